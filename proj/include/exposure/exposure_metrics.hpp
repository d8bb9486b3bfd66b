// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

// Brand visibility metrics from per-frame oriented detections.
//
// Frames are numbered 1..N. For brand l in frame i the visible area A is the
// sum (not the union) of the brand's boxes clipped to the frame, and
//   c = min(1, A / (W * H)),  z = [c > 0].
// Over a video of N frames at r frames per second:
//   exposure        = (1 / r) * sum z
//   present average = 100 * sum(z c) / sum z   (0 when the brand never shows)
//   overall average = 100 * sum(z c) / N
//   maximum         = 100 * max c

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "exposure/records.hpp"

namespace exposure::metrics {

inline constexpr double kDefaultConfThreshold = 0.5;

struct FrameCoverage {
    std::int64_t frame_index = 0;
    int brand_id = 0;
    double coverage = 0.0;
    bool visible = false;
    std::int64_t detection_count = 0;
    bool bridged = false;  ///< presence filled in by temporal_filter; carries no area
};

struct BrandMetrics {
    int brand_id = 0;
    double exposure_s = 0.0;
    double avg_cov_present_pct = 0.0;
    double avg_cov_overall_pct = 0.0;
    double max_cov_pct = 0.0;
    std::int64_t detection_count = 0;
    std::int64_t appearances = 0;  ///< sum of z

    friend bool operator==(const BrandMetrics&, const BrandMetrics&) = default;
};

/// Area of the part of `quad` inside the frame.
double clipped_area(const Quad& quad, const FrameMeta& frame);

FrameCoverage coverage_from_area(double area_sum, std::int64_t detection_count, const FrameMeta& frame,
                                 std::int64_t frame_index, int brand_id);

/// Coverage of one brand in one frame. All detections must share brand and
/// frame; an empty span yields c = 0, z = 0.
FrameCoverage frame_coverage(std::span<const Detection> dets, const FrameMeta& frame);

/// Brand-level metrics from the brand's frame coverages. Frames absent from
/// `coverages` count as z = 0. Requires r > 0 and N > 0.
BrandMetrics aggregate_brand(int brand_id, std::span<const FrameCoverage> coverages, const FrameMeta& frame);

/// Ranking order: exposure descending, then brand id ascending.
bool ranks_before(const BrandMetrics& a, const BrandMetrics& b);

struct TemporalFilter {
    int min_run = 1;  ///< visible runs shorter than this are dropped
    int max_gap = 0;  ///< invisible gaps up to this length between runs are bridged

    void validate() const;
    bool identity() const { return min_run <= 1 && max_gap <= 0; }
};

/// Gap bridging first, then short-run suppression.
std::vector<std::uint8_t> temporal_filter(std::span<const std::uint8_t> z, const TemporalFilter& filter);

/// Same filter applied to one brand's sparse coverage series over frames 1..N.
/// Bridged frames are visible with coverage 0; suppressed frames are removed.
std::vector<FrameCoverage> temporal_filter(std::span<const FrameCoverage> series, std::int64_t frame_count,
                                           const TemporalFilter& filter);

struct TimelinePoint {
    std::int64_t frame_index = 0;
    double coverage = 0.0;
    bool bridged = false;
};

struct ExposureTimeline {
    std::map<int, std::vector<TimelinePoint>> series;  ///< visible frames per brand, increasing
    std::vector<BrandMetrics> ranking;                 ///< top-K by exposure
};

ExposureTimeline build_timeline(std::span<const FrameCoverage> coverages, const FrameMeta& frame, std::size_t top_k);

struct AnalyzeOptions {
    double conf_threshold = kDefaultConfThreshold;
    TemporalFilter filter;
    std::size_t top_k = 10;
    unsigned jobs = 0;
};

struct VideoReport {
    std::string video_id;
    FrameMeta meta;
    bool inferred_frame_count = false;
    std::vector<BrandMetrics> brands;  ///< in ranking order
    ExposureTimeline timeline;
};

/// Batch-wise reduction of a detection stream into per-video reports.
/// Clipping runs in parallel; sums are taken in input order so results do
/// not depend on the worker count.
class ExposureAccumulator {
public:
    /// Returns frame geometry for a video id or throws ConfigError.
    /// A frame_count <= 0 means "infer N from the largest frame index seen".
    using MetaLookup = std::function<FrameMeta(const std::string&)>;

    ExposureAccumulator(MetaLookup lookup, AnalyzeOptions options);

    void add_batch(std::span<const Detection> batch);
    std::vector<VideoReport> finish() const;

    std::size_t used() const { return used_; }
    std::size_t below_threshold() const { return below_threshold_; }

private:
    struct Cell {
        double area = 0.0;
        std::int64_t count = 0;
    };
    struct Video {
        FrameMeta meta;
        bool infer_frames = false;
        std::int64_t max_frame = 0;
        std::map<std::pair<int, std::int64_t>, Cell> cells;  ///< (brand, frame)
    };

    MetaLookup lookup_;
    AnalyzeOptions options_;
    std::map<std::string, Video> videos_;
    std::vector<double> areas_;
    std::size_t used_ = 0;
    std::size_t below_threshold_ = 0;
};

}  // namespace exposure::metrics
