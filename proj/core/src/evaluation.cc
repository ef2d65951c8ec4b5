// Copyright 2026 The QFE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qfe/evaluation.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "qfe/error.h"

namespace qfe {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Count = long double;

// Pairs sharing a value within runs of equal keys of a sorted sequence.
template <class Eq>
Count tied_pairs(std::size_t n, Eq equal) {
    Count ties = 0;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i < n && equal(i - 1, i)) {
            ++run;
        } else {
            ties += Count(run) * Count(run - 1) / 2;
            run = 1;
        }
    }
    return ties;
}

// Merge sort on ys counting exchanges, i.e. strictly inverted pairs.
Count merge_count(std::vector<double> &ys, std::vector<double> &buf, std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) {
        return 0;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    Count swaps = merge_count(ys, buf, lo, mid) + merge_count(ys, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (ys[j] < ys[i]) {
            swaps += Count(mid - i);
            buf[k++] = ys[j++];
        } else {
            buf[k++] = ys[i++];
        }
    }
    while (i < mid) buf[k++] = ys[i++];
    while (j < hi) buf[k++] = ys[j++];
    std::copy(buf.begin() + lo, buf.begin() + hi, ys.begin() + lo);
    return swaps;
}

void check_finite(std::span<const double> v, const char *what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw ParameterError(std::string(what) + " contains a non-finite value");
        }
    }
}

}  // namespace

double kendall_tau(std::span<const double> preds, std::span<const double> trues, TauVariant variant) {
    if (preds.size() != trues.size()) {
        throw ParameterError("kendall_tau: " + std::to_string(preds.size()) + " predictions vs " +
                             std::to_string(trues.size()) + " labels");
    }
    const std::size_t n = preds.size();
    if (n < 2) {
        throw ParameterError("kendall_tau needs at least two points");
    }
    check_finite(preds, "predictions");
    check_finite(trues, "labels");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return preds[a] < preds[b] || (preds[a] == preds[b] && trues[a] < trues[b]);
    });
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        ys[i] = trues[order[i]];
    }
    const Count n0 = Count(n) * Count(n - 1) / 2;
    const Count n1 = tied_pairs(n, [&](std::size_t a, std::size_t b) { return preds[order[a]] == preds[order[b]]; });
    const Count n3 = tied_pairs(n, [&](std::size_t a, std::size_t b) {
        return preds[order[a]] == preds[order[b]] && ys[a] == ys[b];
    });
    std::vector<double> buf(n);
    const Count swaps = merge_count(ys, buf, 0, n);
    const Count n2 = tied_pairs(n, [&](std::size_t a, std::size_t b) { return ys[a] == ys[b]; });

    if (n1 == n0 || n2 == n0) {
        throw ParameterError("kendall_tau is undefined when one input is constant");
    }
    const Count numer = n0 - n1 - n2 + n3 - 2 * swaps;
    const Count denom = variant == TauVariant::B ? std::sqrt((n0 - n1) * (n0 - n2)) : n0;
    return std::clamp(double(numer / denom), -1.0, 1.0);
}

Interval wilson_interval(std::size_t successes, std::size_t n, double z) {
    if (n == 0 || successes > n) {
        throw ParameterError("wilson_interval: need 0 <= successes <= n and n >= 1, got " +
                             std::to_string(successes) + " of " + std::to_string(n));
    }
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw ParameterError("wilson_interval: z must be positive");
    }
    const double nn = double(n);
    const double p = double(successes) / nn;
    const double z2 = z * z;
    const double scale = 1.0 + z2 / nn;
    const double center = (p + z2 / (2 * nn)) / scale;
    const double half = z / scale * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn));
    Interval out{std::max(0.0, center - half), std::min(1.0, center + half)};
    if (successes == 0) out.lo = 0.0;
    if (successes == n) out.hi = 1.0;
    return out;
}

std::vector<ScorePoint> threshold_score_curve(std::span<const double> preds, std::span<const double> trues,
                                              std::span<const double> thresholds, double z) {
    if (preds.size() != trues.size()) {
        throw ParameterError("threshold_score_curve: " + std::to_string(preds.size()) + " predictions vs " +
                             std::to_string(trues.size()) + " labels");
    }
    if (preds.empty() || thresholds.empty()) {
        throw ParameterError("threshold_score_curve needs non-empty data and thresholds");
    }
    if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
        throw ParameterError("threshold_score_curve: thresholds must be sorted ascending");
    }
    check_finite(preds, "predictions");
    check_finite(trues, "labels");

    std::vector<ScorePoint> curve;
    curve.reserve(thresholds.size());
    for (double t : thresholds) {
        ScorePoint p;
        p.threshold = t;
        std::size_t tp = 0, tn = 0;
        for (std::size_t i = 0; i < preds.size(); ++i) {
            if (trues[i] >= t) {
                ++p.positives;
                tp += preds[i] >= t;
            } else {
                ++p.negatives;
                tn += preds[i] < t;
            }
        }
        p.tpr = p.tpr_lo = p.tpr_hi = p.tnr = p.tnr_lo = p.tnr_hi = p.score = kNaN;
        if (p.positives > 0) {
            p.tpr_defined = true;
            p.tpr = double(tp) / double(p.positives);
            const Interval w = wilson_interval(tp, p.positives, z);
            p.tpr_lo = w.lo;
            p.tpr_hi = w.hi;
        }
        if (p.negatives > 0) {
            p.tnr_defined = true;
            p.tnr = double(tn) / double(p.negatives);
            const Interval w = wilson_interval(tn, p.negatives, z);
            p.tnr_lo = w.lo;
            p.tnr_hi = w.hi;
        }
        if (p.defined()) {
            p.score = 0.5 * (p.tpr + p.tnr);
        }
        curve.push_back(p);
    }
    return curve;
}

std::vector<double> linear_thresholds(double lo, double hi, std::size_t steps) {
    if (steps == 0 || !(hi > lo)) {
        throw ParameterError("linear_thresholds: need hi > lo and steps >= 1");
    }
    std::vector<double> out(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        out[i] = lo + (hi - lo) * double(i) / double(steps);
    }
    return out;
}

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "";
    }
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string score_curve_csv(const std::vector<ScorePoint> &curve) {
    std::string out = "threshold,tpr,tpr_lo,tpr_hi,tnr,tnr_lo,tnr_hi,score\n";
    for (const ScorePoint &p : curve) {
        for (double v : {p.threshold, p.tpr, p.tpr_lo, p.tpr_hi, p.tnr, p.tnr_lo, p.tnr_hi}) {
            out += format_double(v);
            out += ',';
        }
        out += format_double(p.score);
        out += '\n';
    }
    return out;
}

HeatmapGrid export_heatmap(std::span<const double> preds, std::span<const double> trues, std::size_t bins, double lo,
                           double hi) {
    if (bins == 0) {
        throw ParameterError("export_heatmap needs at least one bin");
    }
    if (preds.size() != trues.size()) {
        throw ParameterError("export_heatmap: " + std::to_string(preds.size()) + " predictions vs " +
                             std::to_string(trues.size()) + " labels");
    }
    check_finite(preds, "predictions");
    check_finite(trues, "labels");
    if (!(lo < hi)) {
        if (preds.empty()) {
            lo = 0.0;
            hi = 1.0;
        } else {
            const auto [pmin, pmax] = std::minmax_element(preds.begin(), preds.end());
            const auto [tmin, tmax] = std::minmax_element(trues.begin(), trues.end());
            lo = std::min(*pmin, *tmin);
            hi = std::max(*pmax, *tmax);
            if (!(lo < hi)) {
                lo -= 0.5;
                hi += 0.5;
            }
        }
    }
    HeatmapGrid g;
    g.bins = bins;
    g.edges = linear_thresholds(lo, hi, bins);
    g.cells.assign(bins * bins, 0.0);
    const auto bin_of = [&](double v) {
        const double f = (v - lo) / (hi - lo) * double(bins);
        return std::size_t(std::clamp(f, 0.0, double(bins - 1)));
    };
    std::vector<std::size_t> counts(bins * bins, 0);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        ++counts[bin_of(trues[i]) * bins + bin_of(preds[i])];
    }
    g.samples = preds.size();
    if (g.samples > 0) {
        for (std::size_t k = 0; k < counts.size(); ++k) {
            g.cells[k] = double(counts[k]) / double(g.samples);
        }
    }
    return g;
}

std::string heatmap_csv(const HeatmapGrid &grid) {
    std::string out = "edges";
    for (double e : grid.edges) {
        out += ',' + format_double(e);
    }
    out += '\n';
    for (std::size_t i = 0; i < grid.bins; ++i) {
        out += format_double(grid.edges[i]) + ',' + format_double(grid.edges[i + 1]);
        for (std::size_t j = 0; j < grid.bins; ++j) {
            out += ',' + format_double(grid.at(i, j));
        }
        out += '\n';
    }
    return out;
}

}  // namespace qfe
