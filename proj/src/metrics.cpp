#include "nile/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "nile/error.hpp"

namespace nile {

bool dominates(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw UsageError(fmt::format("dominates: dimension mismatch ({} vs {})", a.size(), b.size()));
    }
    bool strict = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return false;
        if (a[i] > b[i]) strict = true;
    }
    return strict;
}

std::size_t check_dimension(const SolutionSet& set) {
    if (set.empty()) return 0;
    const std::size_t d = set.front().size();
    if (d == 0) throw UsageError("solution set points must have at least one objective");
    for (const auto& p : set) {
        if (p.size() != d) {
            throw UsageError(fmt::format("solution set mixes dimensions {} and {}", d, p.size()));
        }
        for (double v : p) {
            if (!std::isfinite(v)) throw UsageError("solution set contains a non-finite value");
        }
    }
    return d;
}

SolutionSet pareto_filter(const SolutionSet& set) {
    check_dimension(set);
    // In lexicographically descending order no point is dominated by a later
    // one, so each point only needs checking against those already kept.
    std::vector<std::size_t> idx(set.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return set[a] > set[b]; });

    std::vector<std::size_t> kept;
    std::vector<char> keep(set.size(), 0);
    for (std::size_t i : idx) {
        bool drop = false;
        for (std::size_t k : kept) {
            if (set[k] == set[i] || dominates(set[k], set[i])) {
                drop = true;
                break;
            }
        }
        if (!drop) {
            kept.push_back(i);
            keep[i] = 1;
        }
    }
    SolutionSet out;
    out.reserve(kept.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (keep[i]) out.push_back(set[i]);
    }
    return out;
}

namespace {

// Attained region of a 2-d point set above (r0, r1), maintained as a staircase:
// keys ascending, values strictly descending.
class Staircase {
public:
    Staircase(double r0, double r1) : r0_(r0), r1_(r1) {}

    /// Inserts (a, b) and returns the area it adds.
    double insert(double a, double b) {
        auto it = steps_.lower_bound(a);
        double cover = it == steps_.end() ? r1_ : it->second;
        if (b <= cover) return 0.0;

        double added = 0.0;
        double right = a;
        bool blocked = false;
        while (it != steps_.begin()) {
            auto pred = std::prev(it);
            added += (right - pred->first) * (b - cover);
            if (pred->second > b) {
                blocked = true;
                break;
            }
            cover = pred->second;
            right = pred->first;
            it = steps_.erase(pred);
        }
        if (!blocked) added += (right - r0_) * (b - cover);
        steps_[a] = b;
        area_ += added;
        return added;
    }

    double area() const { return area_; }

private:
    double r0_, r1_;
    double area_ = 0.0;
    std::map<double, double> steps_;
};

using Points = std::vector<const double*>;

double hv_2d(const Points& pts, std::span<const double> ref) {
    Staircase stairs(ref[0], ref[1]);
    for (const double* p : pts) stairs.insert(p[0], p[1]);
    return stairs.area();
}

// Sweep from the top of the third axis down, growing the 2-d attained area.
double hv_3d(Points pts, std::span<const double> ref) {
    std::sort(pts.begin(), pts.end(), [](const double* a, const double* b) { return a[2] > b[2]; });
    Staircase stairs(ref[0], ref[1]);
    double volume = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        stairs.insert(pts[k][0], pts[k][1]);
        const double lower = k + 1 < pts.size() ? pts[k + 1][2] : ref[2];
        volume += stairs.area() * (pts[k][2] - lower);
    }
    return volume;
}

double hv_recursive(Points pts, std::span<const double> ref, std::size_t d) {
    if (pts.empty()) return 0.0;
    if (d == 1) {
        double best = ref[0];
        for (const double* p : pts) best = std::max(best, p[0]);
        return best - ref[0];
    }
    if (d == 2) return hv_2d(pts, ref);
    if (d == 3) return hv_3d(std::move(pts), ref);

    // Slice along the last axis: between consecutive coordinates the cross
    // section is the (d-1)-volume of every point at or above the slice.
    const std::size_t last = d - 1;
    std::sort(pts.begin(), pts.end(), [last](const double* a, const double* b) { return a[last] > b[last]; });
    double volume = 0.0;
    Points prefix;
    prefix.reserve(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        prefix.push_back(pts[k]);
        const double lower = k + 1 < pts.size() ? pts[k + 1][last] : ref[last];
        const double width = pts[k][last] - lower;
        if (width > 0.0) volume += hv_recursive(prefix, ref, last) * width;
    }
    return volume;
}

}  // namespace

double hypervolume(const SolutionSet& set, std::span<const double> ref) {
    const std::size_t d = check_dimension(set);
    if (set.empty()) return 0.0;
    if (ref.size() != d) {
        throw UsageError(fmt::format("hypervolume: reference point has dimension {}, set has {}", ref.size(), d));
    }
    SolutionSet above;
    for (const auto& p : set) {
        bool strictly = true;
        for (std::size_t i = 0; i < d; ++i) strictly = strictly && p[i] > ref[i];
        if (strictly) above.push_back(p);
    }
    const SolutionSet front = pareto_filter(above);
    Points pts;
    pts.reserve(front.size());
    for (const auto& p : front) pts.push_back(p.data());
    return hv_recursive(std::move(pts), ref, d);
}

double sparsity(const SolutionSet& set) {
    const std::size_t d = check_dimension(set);
    if (set.empty()) throw UsageError("sparsity of an empty set is undefined");
    if (set.size() == 1) return 0.0;
    double total = 0.0;
    std::vector<double> column(set.size());
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < set.size(); ++i) column[i] = set[i][j];
        std::sort(column.begin(), column.end());
        for (std::size_t i = 0; i + 1 < column.size(); ++i) {
            const double gap = column[i + 1] - column[i];
            total += gap * gap;
        }
    }
    return total / static_cast<double>(set.size() - 1);
}

SolutionSet merge_and_filter(const std::vector<SolutionSet>& sets) {
    SolutionSet all;
    std::optional<std::size_t> dim;
    for (const auto& s : sets) {
        const std::size_t d = check_dimension(s);
        if (d == 0) continue;
        if (dim && *dim != d) throw UsageError(fmt::format("merge: dimension mismatch ({} vs {})", *dim, d));
        dim = d;
        all.insert(all.end(), s.begin(), s.end());
    }
    return pareto_filter(all);
}

Point default_reference_point(const std::vector<SolutionSet>& sets) {
    Point lo, hi;
    for (const auto& s : sets) {
        const std::size_t d = check_dimension(s);
        if (d == 0) continue;
        if (lo.empty()) {
            lo.assign(d, INFINITY);
            hi.assign(d, -INFINITY);
        } else if (lo.size() != d) {
            throw UsageError("reference point: dimension mismatch across sets");
        }
        for (const auto& p : s) {
            for (std::size_t j = 0; j < d; ++j) {
                lo[j] = std::min(lo[j], p[j]);
                hi[j] = std::max(hi[j], p[j]);
            }
        }
    }
    if (lo.empty()) throw UsageError("reference point: no points in any set");
    for (std::size_t j = 0; j < lo.size(); ++j) lo[j] -= std::max(0.01 * (hi[j] - lo[j]), 1e-9);
    return lo;
}

int baseline_percentage(double hv, double baseline_hv) {
    if (!(baseline_hv > 0.0)) throw UsageError("baseline hypervolume must be positive");
    return static_cast<int>(std::lround(100.0 * hv / baseline_hv));
}

MetricsRow evaluate_set(const std::string& name, const SolutionSet& set, std::span<const double> ref) {
    const SolutionSet front = pareto_filter(set);
    MetricsRow row;
    row.name = name;
    row.cardinality = front.size();
    row.hypervolume = front.empty() ? 0.0 : hypervolume(front, ref);
    row.sparsity = front.empty() ? 0.0 : sparsity(front);
    return row;
}

MetricsReport baseline_percentages(std::vector<MetricsRow> rows, const std::string& baseline,
                                   Point reference_point) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const MetricsRow& r) { return r.name == baseline; });
    if (it == rows.end()) throw UsageError(fmt::format("baseline '{}' is not among the rows", baseline));
    const double base = it->hypervolume;
    for (auto& r : rows) r.pct_of_baseline = baseline_percentage(r.hypervolume, base);
    return {std::move(rows), baseline, std::move(reference_point)};
}

}  // namespace nile
