// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

#include "exposure/tightness.hpp"

#include <algorithm>
#include <cmath>

namespace exposure::tightness {

const char* to_string(Source s) {
    return s == Source::GroundTruth ? "ground_truth" : "prediction";
}

TRSample make_sample(const geom::QuadOBB<double>& quad, Source source, int class_id) {
    return TRSample{source, tightness_ratio(quad), geom::obb_orientation_deg(quad), class_id};
}

std::size_t bin_count(double bin_width_deg) {
    if (!std::isfinite(bin_width_deg) || bin_width_deg <= 0 || bin_width_deg > 90)
        throw ConfigError("bin width must lie in (0, 90]");
    const double bins = 90.0 / bin_width_deg;
    const double rounded = std::round(bins);
    if (std::abs(bins - rounded) > 1e-9) throw ConfigError("bin width must divide 90 evenly");
    return static_cast<std::size_t>(rounded);
}

namespace {

std::size_t bin_index(double angle, double width, std::size_t nbins) {
    const auto idx = static_cast<std::size_t>(std::max(0.0, std::floor(angle / width)));
    return std::min(idx, nbins - 1);
}

}  // namespace

std::vector<TRBinStat> bin_by_orientation(std::span<const TRSample> samples, double bin_width_deg) {
    const std::size_t nbins = bin_count(bin_width_deg);
    std::vector<TRBinStat> bins(nbins);
    std::vector<std::vector<double>> values(nbins);
    for (std::size_t b = 0; b < nbins; ++b) {
        bins[b].lo = bin_width_deg * static_cast<double>(b);
        bins[b].hi = bin_width_deg * static_cast<double>(b + 1);
    }
    for (const auto& s : samples) values[bin_index(s.orientation_deg, bin_width_deg, nbins)].push_back(s.tr);

    for (std::size_t b = 0; b < nbins; ++b) {
        const auto& v = values[b];
        bins[b].n = v.size();
        if (v.empty()) continue;
        double sum = 0;
        for (double x : v) sum += x;
        const double mean = sum / static_cast<double>(v.size());
        bins[b].mean_tr = mean;
        if (v.size() >= 2) {
            double ss = 0;
            for (double x : v) ss += (x - mean) * (x - mean);
            const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
            bins[b].ci95_half_width = 1.96 * sd / std::sqrt(static_cast<double>(v.size()));
        }
    }
    return bins;
}

TRComparison compare_gt_pred_tr(std::span<const TRSample> gt, std::span<const TRSample> pred,
                                double bin_width_deg) {
    const auto gt_bins = bin_by_orientation(gt, bin_width_deg);
    const auto pred_bins = bin_by_orientation(pred, bin_width_deg);
    TRComparison out;
    out.bin_width_deg = bin_width_deg;
    double gap_sum = 0;
    std::size_t gap_n = 0;
    for (std::size_t b = 0; b < gt_bins.size(); ++b) {
        TRGapRow row;
        row.lo = gt_bins[b].lo;
        row.hi = gt_bins[b].hi;
        row.n_gt = gt_bins[b].n;
        row.n_pred = pred_bins[b].n;
        if (row.n_gt > 0) row.gt_mean = gt_bins[b].mean_tr;
        if (row.n_pred > 0) row.pred_mean = pred_bins[b].mean_tr;
        if (row.gt_mean && row.pred_mean) {
            row.abs_gap = std::abs(*row.gt_mean - *row.pred_mean);
            gap_sum += *row.abs_gap;
            ++gap_n;
        }
        out.rows.push_back(row);
    }
    if (gap_n > 0) out.mean_abs_gap = gap_sum / static_cast<double>(gap_n);
    return out;
}

}  // namespace exposure::tightness
