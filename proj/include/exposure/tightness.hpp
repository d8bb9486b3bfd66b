// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

// Tightness ratio (TR): area of an oriented box over the area of its
// enclosing axis-aligned box, and its breakdown by box orientation.

#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "exposure/geometry.hpp"

namespace exposure::tightness {

template <typename Scalar>
Scalar tightness_ratio(const geom::QuadOBB<Scalar>& quad) {
    geom::detail::require_usable(quad, "tightness_ratio");
    return quad.area() / geom::rect_area(geom::enclosing_hbb(quad));
}

/// TR of a w x h rectangle rotated by theta in [0, 90] degrees.
template <typename Scalar>
Scalar tr_rect_closed_form(Scalar w, Scalar h, Scalar theta_deg) {
    const Scalar wh = w * h;
    const Scalar s2 = std::sin(Scalar(2) * theta_deg * std::numbers::pi_v<Scalar> / Scalar(180));
    return wh / (wh + (w * w + h * h) / Scalar(2) * s2);
}

enum class Source { GroundTruth, Prediction };

const char* to_string(Source s);

struct TRSample {
    Source source = Source::GroundTruth;
    double tr = 1.0;
    double orientation_deg = 0.0;
    int class_id = 0;
};

TRSample make_sample(const geom::QuadOBB<double>& quad, Source source, int class_id);

struct TRBinStat {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 0;
    double mean_tr = 0.0;
    std::optional<double> ci95_half_width;  ///< present when n >= 2
};

/// Bins samples by orientation into [lo, hi) intervals of `bin_width_deg`;
/// the last bin is closed at 90. The width must divide 90 evenly.
std::vector<TRBinStat> bin_by_orientation(std::span<const TRSample> samples, double bin_width_deg);

std::size_t bin_count(double bin_width_deg);

struct TRGapRow {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n_gt = 0;
    std::size_t n_pred = 0;
    std::optional<double> gt_mean;
    std::optional<double> pred_mean;
    std::optional<double> abs_gap;  ///< only where both sides are occupied
};

struct TRComparison {
    double bin_width_deg = 15.0;
    std::vector<TRGapRow> rows;
    std::optional<double> mean_abs_gap;
};

TRComparison compare_gt_pred_tr(std::span<const TRSample> gt, std::span<const TRSample> pred,
                                double bin_width_deg);

}  // namespace exposure::tightness
