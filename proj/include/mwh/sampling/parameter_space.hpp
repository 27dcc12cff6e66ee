#pragma once

#include <cmath>
#include <ostream>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mwh/csv.hpp"
#include "mwh/error.hpp"

namespace mwh {

struct Dimension {
    std::string name;
    double lower = 0.0;
    double upper = 1.0;
};

/// Ordered, named box of feasible parameter values.
class ParameterSpace {
public:
    ParameterSpace() = default;

    explicit ParameterSpace(std::vector<Dimension> dims) : dims_(std::move(dims)) {
        std::set<std::string> names;
        for (const auto& d : dims_) {
            if (!(d.lower < d.upper) || !std::isfinite(d.lower) || !std::isfinite(d.upper))
                throw ConfigError("invalid bounds for '" + d.name + "': lower must be < upper");
            if (!names.insert(d.name).second)
                throw ConfigError("duplicate parameter name '" + d.name + "'");
        }
    }

    std::size_t size() const noexcept { return dims_.size(); }
    const Dimension& operator[](std::size_t i) const noexcept { return dims_[i]; }
    const std::vector<Dimension>& dims() const noexcept { return dims_; }

    std::optional<std::size_t> find(std::string_view name) const noexcept {
        for (std::size_t i = 0; i < dims_.size(); ++i)
            if (dims_[i].name == name) return i;
        return std::nullopt;
    }

    std::size_t index_of(std::string_view name) const {
        if (auto i = find(name)) return *i;
        throw ConfigError("unknown parameter '" + std::string(name) + "'");
    }

    /// Returns a copy with one dimension's bounds replaced.
    ParameterSpace with_bounds(std::string_view name, double lower, double upper) const {
        auto dims = dims_;
        auto& d = dims[index_of(name)];
        d.lower = lower;
        d.upper = upper;
        return ParameterSpace(std::move(dims));
    }

    bool contains(std::span<const double> x) const noexcept {
        if (x.size() != dims_.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (!(x[i] >= dims_[i].lower && x[i] <= dims_[i].upper)) return false;
        return true;
    }

private:
    std::vector<Dimension> dims_;
};

/// Parameter values aligned with a ParameterSpace.
using ParameterSet = std::vector<double>;

/// `run_id,<names...>` stream format.
inline void write_parameter_sets(std::ostream& out, const ParameterSpace& space,
                                 std::span<const ParameterSet> sets, long long first_id = 0) {
    out << "run_id";
    for (const auto& d : space.dims()) out << ',' << d.name;
    out << '\n';
    for (std::size_t i = 0; i < sets.size(); ++i) {
        out << first_id + static_cast<long long>(i);
        for (double v : sets[i]) out << ',' << csv::format_double(v);
        out << '\n';
    }
}

struct LoadedSets {
    std::vector<long long> run_ids;
    std::vector<ParameterSet> sets;
};

/// Reads a parameter-set file; columns are matched to the space by name and
/// every value must lie inside its bounds.
inline LoadedSets read_parameter_sets(const std::string& path, const ParameterSpace& space) {
    const auto table = csv::read(path);
    const auto id_col = table.column("run_id");
    std::vector<std::size_t> cols;
    for (const auto& d : space.dims()) cols.push_back(table.column(d.name));
    LoadedSets out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        auto id = csv::to_int(row[id_col]);
        if (!id) throw DataError("invalid run_id at row " + std::to_string(r + 1));
        ParameterSet set;
        for (std::size_t j = 0; j < cols.size(); ++j) {
            auto v = csv::to_double(row[cols[j]]);
            if (!v) throw DataError("non-numeric cell at row " + std::to_string(r + 1));
            set.push_back(*v);
        }
        if (!space.contains(set))
            throw DataError("parameter set at row " + std::to_string(r + 1) + " outside bounds");
        out.run_ids.push_back(*id);
        out.sets.push_back(std::move(set));
    }
    return out;
}

}  // namespace mwh
