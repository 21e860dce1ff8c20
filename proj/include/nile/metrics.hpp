#pragma once

// Solution-set quality indicators. All objectives are maximized.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nile {

using Point = std::vector<double>;
using SolutionSet = std::vector<Point>;

/// True iff a is at least as good as b everywhere and strictly better somewhere.
bool dominates(std::span<const double> a, std::span<const double> b);

/// Throws UsageError unless every point has the same dimension (>= 1) and
/// finite coordinates. Returns the dimension, 0 for an empty set.
std::size_t check_dimension(const SolutionSet& set);

/// Non-dominated subset with exact duplicates collapsed, in input order
/// (first occurrence kept).
SolutionSet pareto_filter(const SolutionSet& set);

/// Exact measure of the union of boxes [ref, p]. Points not strictly above the
/// reference point in every coordinate contribute nothing.
double hypervolume(const SolutionSet& set, std::span<const double> ref);

/// Mean squared gap between consecutive values of each objective sorted
/// independently, summed over objectives. Zero for a single point.
double sparsity(const SolutionSet& set);

/// Pareto filter of the union of all sets.
SolutionSet merge_and_filter(const std::vector<SolutionSet>& sets);

/// Componentwise minimum over every point of every set, lowered by 1% of the
/// objective's range (at least 1e-9).
Point default_reference_point(const std::vector<SolutionSet>& sets);

/// round(100 * hv / baseline_hv). Throws UsageError for a non-positive baseline.
int baseline_percentage(double hv, double baseline_hv);

struct MetricsRow {
    std::string name;
    double hypervolume = 0.0;
    std::optional<int> pct_of_baseline;
    std::size_t cardinality = 0;
    double sparsity = 0.0;
};

struct MetricsReport {
    std::vector<MetricsRow> rows;
    std::string baseline;
    Point reference_point;
};

/// Metrics of the Pareto-filtered set.
MetricsRow evaluate_set(const std::string& name, const SolutionSet& set, std::span<const double> ref);

/// Fills pct_of_baseline of every row against the row named `baseline`.
MetricsReport baseline_percentages(std::vector<MetricsRow> rows, const std::string& baseline,
                                   Point reference_point = {});

}  // namespace nile
