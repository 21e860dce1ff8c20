#include "nile/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "nile/error.hpp"

namespace nile {

std::vector<NormalizedSet> normalize_sets(const std::vector<SolutionSet>& sets) {
    Point lo, hi;
    for (const auto& s : sets) {
        const std::size_t d = check_dimension(s);
        if (d == 0) continue;
        if (lo.empty()) {
            lo.assign(d, INFINITY);
            hi.assign(d, -INFINITY);
        } else if (lo.size() != d) {
            throw UsageError("normalize_sets: dimension mismatch across sets");
        }
        for (const auto& p : s) {
            for (std::size_t j = 0; j < d; ++j) {
                lo[j] = std::min(lo[j], p[j]);
                hi[j] = std::max(hi[j], p[j]);
            }
        }
    }
    if (lo.empty()) throw UsageError("normalize_sets: union of sets is empty");

    std::vector<NormalizedSet> out;
    out.reserve(sets.size());
    for (const auto& s : sets) {
        NormalizedSet n{{}, lo, hi};
        n.values.reserve(s.size());
        for (const auto& p : s) {
            Point q(p.size());
            for (std::size_t j = 0; j < p.size(); ++j) {
                q[j] = hi[j] > lo[j] ? (p[j] - lo[j]) / (hi[j] - lo[j]) : 0.5;
            }
            n.values.push_back(std::move(q));
        }
        out.push_back(std::move(n));
    }
    return out;
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string join_bounds(const Point& p) {
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) out += fmt::format("{}{}", i ? "," : "", p[i]);
    return out;
}

}  // namespace

std::string parallel_coordinates_svg(const std::vector<NamedSet>& sets, const std::vector<std::string>& axis_labels,
                                     const PlotGeometry& g) {
    const double width = g.panel_width * static_cast<double>(std::max<std::size_t>(sets.size(), 1));
    const double height = g.margin_top + g.panel_height + g.margin_bottom;
    const std::size_t axes = axis_labels.size();

    std::ostringstream svg;
    svg << fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n",
        width, height, width, height);
    svg << "<style>.axis{stroke:#444;stroke-width:1}.solution{fill:none;stroke:#1f77b4;stroke-opacity:0.45;"
           "stroke-width:1}.count{font-weight:bold}</style>\n";
    if (!sets.empty()) {
        svg << fmt::format("<desc>normalization: shared per-objective min-max over all panels; lower=[{}] "
                           "upper=[{}]; degenerate ranges map to 0.5</desc>\n",
                           join_bounds(sets.front().second.lower), join_bounds(sets.front().second.upper));
    }
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    const double plot_w = g.panel_width - g.margin_left - g.margin_right;
    auto axis_x = [&](std::size_t j) {
        return axes > 1 ? g.margin_left + plot_w * static_cast<double>(j) / static_cast<double>(axes - 1)
                        : g.margin_left + 0.5 * plot_w;
    };
    auto value_y = [&](double v) { return g.margin_top + g.panel_height * (1.0 - std::clamp(v, 0.0, 1.0)); };

    for (std::size_t p = 0; p < sets.size(); ++p) {
        const auto& [name, set] = sets[p];
        svg << fmt::format("<g class=\"panel\" data-name=\"{}\" data-count=\"{}\" transform=\"translate({:.0f},0)\">\n",
                           xml_escape(name), set.values.size(), g.panel_width * static_cast<double>(p));
        svg << fmt::format("<text x=\"{:.1f}\" y=\"18\" text-anchor=\"middle\">{}</text>\n",
                           g.margin_left + 0.5 * plot_w, xml_escape(name));
        svg << fmt::format("<text class=\"count\" x=\"{:.1f}\" y=\"36\" text-anchor=\"middle\">n = {}</text>\n",
                           g.margin_left + 0.5 * plot_w, set.values.size());
        for (std::size_t j = 0; j < axes; ++j) {
            svg << fmt::format("<line class=\"axis\" x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\"/>\n",
                               axis_x(j), value_y(1.0), value_y(0.0));
            svg << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", axis_x(j),
                               value_y(0.0) + 20.0, xml_escape(axis_labels[j]));
        }
        for (const auto& point : set.values) {
            if (point.size() != axes) throw UsageError("parallel_coordinates_svg: point dimension differs from axis count");
            svg << "<polyline class=\"solution\" points=\"";
            for (std::size_t j = 0; j < axes; ++j) {
                svg << fmt::format("{}{:.2f},{:.2f}", j ? " " : "", axis_x(j), value_y(point[j]));
            }
            svg << "\"/>\n";
        }
        svg << "</g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string metrics_table_render(const MetricsReport& report) {
    if (report.rows.empty()) throw UsageError("metrics_table_render: report has no rows");

    struct Cells {
        std::string name, hv, card, sparsity;
    };
    std::vector<Cells> cells;
    cells.push_back({"Algorithm", "Hypervolume (% Baseline)", "Cardinality", "Sparsity"});
    for (const auto& r : report.rows) {
        std::string name = r.name;
        if (r.name == report.baseline) name += " (Baseline)";
        std::string hv = fmt::format("{:.2E}", r.hypervolume);
        if (r.pct_of_baseline) hv += fmt::format(" ({}%)", *r.pct_of_baseline);
        cells.push_back({name, hv, fmt::format("{}", r.cardinality), fmt::format("{:.3f}", r.sparsity)});
    }

    std::size_t w[4] = {0, 0, 0, 0};
    for (const auto& c : cells) {
        w[0] = std::max(w[0], c.name.size());
        w[1] = std::max(w[1], c.hv.size());
        w[2] = std::max(w[2], c.card.size());
        w[3] = std::max(w[3], c.sparsity.size());
    }
    std::ostringstream out;
    const std::string rule(w[0] + w[1] + w[2] + w[3] + 6, '-');
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        out << fmt::format("{:<{}}  {:>{}}  {:>{}}  {:>{}}\n", c.name, w[0], c.hv, w[1], c.card, w[2], c.sparsity, w[3]);
        if (i == 0) out << rule << '\n';
    }
    out << rule << '\n';
    if (!report.reference_point.empty()) {
        out << "reference point: (" << join_bounds(report.reference_point) << ")\n";
    }
    return out.str();
}

std::string metrics_csv(const MetricsReport& report) {
    std::ostringstream out;
    out << "algorithm,hypervolume,hypervolume_pct_of_baseline,cardinality,sparsity\n";
    for (const auto& r : report.rows) {
        out << r.name << ',' << fmt::format("{}", r.hypervolume) << ','
            << (r.pct_of_baseline ? fmt::format("{}", *r.pct_of_baseline) : std::string()) << ',' << r.cardinality
            << ',' << fmt::format("{}", r.sparsity) << '\n';
    }
    return out.str();
}

}  // namespace nile
