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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qfe {

enum class TauVariant { B, A };

/// Kendall rank correlation in O(n log n). tau-b corrects for ties on either
/// side; tau-a divides by the plain pair count. Throws ParameterError on
/// length mismatch, fewer than two points, or input with no untied pair.
double kendall_tau(std::span<const double> preds, std::span<const double> trues, TauVariant variant = TauVariant::B);

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

Interval wilson_interval(std::size_t successes, std::size_t n, double z = 1.96);

/// One threshold of the (TPR + TNR) / 2 curve. A side with no members is
/// undefined; its rate, interval and the score are then NaN.
struct ScorePoint {
    double threshold = 0.0;
    std::size_t positives = 0;
    std::size_t negatives = 0;
    bool tpr_defined = false;
    bool tnr_defined = false;
    double tpr, tpr_lo, tpr_hi;
    double tnr, tnr_lo, tnr_hi;
    double score;

    bool defined() const { return tpr_defined && tnr_defined; }
};

std::vector<ScorePoint> threshold_score_curve(std::span<const double> preds, std::span<const double> trues,
                                              std::span<const double> thresholds, double z = 1.96);

/// `steps + 1` evenly spaced values covering [lo, hi].
std::vector<double> linear_thresholds(double lo, double hi, std::size_t steps);

/// Columns threshold,tpr,tpr_lo,tpr_hi,tnr,tnr_lo,tnr_hi,score. Undefined
/// values are written as empty fields.
std::string score_curve_csv(const std::vector<ScorePoint> &curve);

/// Normalized 2D histogram. cells[i * bins + j] is the mass with the true
/// value in bin i and the prediction in bin j. Both axes share one range so
/// that preds == trues lands on the diagonal.
struct HeatmapGrid {
    std::size_t bins = 0;
    std::vector<double> edges;
    std::vector<double> cells;
    std::size_t samples = 0;

    bool empty() const { return samples == 0; }
    double at(std::size_t true_bin, std::size_t pred_bin) const { return cells[true_bin * bins + pred_bin]; }
};

/// Range taken from the data when lo >= hi.
HeatmapGrid export_heatmap(std::span<const double> preds, std::span<const double> trues, std::size_t bins,
                           double lo = 0.0, double hi = 0.0);

/// Header `edges,e0,...,eB`; then one row per true bin:
/// `true_lo,true_hi,m0,...,m(B-1)`.
std::string heatmap_csv(const HeatmapGrid &grid);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace qfe
