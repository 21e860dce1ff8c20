#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nile/metrics.hpp"

namespace nile {

/// A solution set mapped affinely to [0, 1] per objective using bounds shared
/// by all sets under comparison. Degenerate objectives map to 0.5.
struct NormalizedSet {
    SolutionSet values;
    Point lower;
    Point upper;
};

std::vector<NormalizedSet> normalize_sets(const std::vector<SolutionSet>& sets);

using NamedSet = std::pair<std::string, NormalizedSet>;

/// Canvas geometry of the parallel-coordinates plot, in SVG user units.
struct PlotGeometry {
    double panel_width = 280.0;
    double panel_height = 260.0;
    double margin_left = 30.0;
    double margin_right = 20.0;
    double margin_top = 56.0;
    double margin_bottom = 34.0;
};

/// One panel per set, one polyline per solution, labelled axes and the
/// solution count above each panel. Output depends only on the input.
std::string parallel_coordinates_svg(const std::vector<NamedSet>& sets,
                                     const std::vector<std::string>& axis_labels = {"ED", "SD", "HAD", "EH"},
                                     const PlotGeometry& geometry = {});

/// Aligned text table: hypervolume as d.ddE+XX with the baseline percentage,
/// cardinality, and sparsity with three decimals.
std::string metrics_table_render(const MetricsReport& report);

std::string metrics_csv(const MetricsReport& report);

}  // namespace nile
