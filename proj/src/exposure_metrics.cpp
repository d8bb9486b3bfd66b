// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

#include "exposure/exposure_metrics.hpp"

#include <algorithm>

#include "exposure/parallel.hpp"

namespace exposure::metrics {

double clipped_area(const Quad& quad, const FrameMeta& frame) {
    return geom::clip_to_rect(quad, frame.frame_rect()).area();
}

FrameCoverage coverage_from_area(double area_sum, std::int64_t detection_count, const FrameMeta& frame,
                                 std::int64_t frame_index, int brand_id) {
    const double area_f = frame.frame_area();
    if (!(area_f > 0)) throw ConfigError("frame area must be positive");
    FrameCoverage fc;
    fc.frame_index = frame_index;
    fc.brand_id = brand_id;
    fc.coverage = std::min(1.0, area_sum / area_f);
    fc.visible = fc.coverage > 0.0;
    fc.detection_count = detection_count;
    return fc;
}

FrameCoverage frame_coverage(std::span<const Detection> dets, const FrameMeta& frame) {
    if (dets.empty()) return coverage_from_area(0.0, 0, frame, 0, 0);
    double area = 0.0;
    for (const auto& d : dets) {
        if (d.class_id != dets.front().class_id || d.frame_index != dets.front().frame_index)
            throw ContractError("frame_coverage needs detections of one brand in one frame");
        area += clipped_area(d.quad, frame);
    }
    return coverage_from_area(area, static_cast<std::int64_t>(dets.size()), frame, dets.front().frame_index,
                              dets.front().class_id);
}

BrandMetrics aggregate_brand(int brand_id, std::span<const FrameCoverage> coverages, const FrameMeta& frame) {
    if (!(frame.frame_rate > 0)) throw ConfigError("frame rate must be positive");
    if (frame.frame_count <= 0) throw ConfigError("frame count must be positive");
    const double dt = 1.0 / frame.frame_rate;
    const auto n = static_cast<double>(frame.frame_count);

    std::int64_t visible = 0;
    std::int64_t detections = 0;
    double zc_sum = 0.0;
    double c_max = 0.0;
    for (const auto& fc : coverages) {
        if (fc.frame_index < 1 || fc.frame_index > frame.frame_count)
            throw DataError("frame " + std::to_string(fc.frame_index) + " outside 1.." +
                            std::to_string(frame.frame_count));
        detections += fc.detection_count;
        c_max = std::max(c_max, fc.coverage);
        if (fc.visible) {
            ++visible;
            zc_sum += fc.coverage;
        }
    }

    BrandMetrics m;
    m.brand_id = brand_id;
    m.appearances = visible;
    m.exposure_s = dt * static_cast<double>(visible);
    m.avg_cov_present_pct = visible > 0 ? 100.0 * zc_sum / static_cast<double>(visible) : 0.0;
    m.avg_cov_overall_pct = 100.0 * zc_sum / n;
    m.max_cov_pct = 100.0 * c_max;
    m.detection_count = detections;
    return m;
}

bool ranks_before(const BrandMetrics& a, const BrandMetrics& b) {
    if (a.exposure_s != b.exposure_s) return a.exposure_s > b.exposure_s;
    return a.brand_id < b.brand_id;
}

void TemporalFilter::validate() const {
    if (min_run < 1) throw ConfigError("min_run must be >= 1");
    if (max_gap < 0) throw ConfigError("max_gap must be >= 0");
}

std::vector<std::uint8_t> temporal_filter(std::span<const std::uint8_t> z, const TemporalFilter& filter) {
    filter.validate();
    std::vector<std::uint8_t> out(z.begin(), z.end());
    const std::size_t n = out.size();

    if (filter.max_gap > 0) {
        std::size_t i = 0;
        while (i < n && !out[i]) ++i;  // leading gap is not between runs
        while (i < n) {
            while (i < n && out[i]) ++i;
            const std::size_t gap_start = i;
            while (i < n && !out[i]) ++i;
            if (i < n && i - gap_start <= static_cast<std::size_t>(filter.max_gap))
                std::fill(out.begin() + static_cast<std::ptrdiff_t>(gap_start), out.begin() + static_cast<std::ptrdiff_t>(i), 1);
        }
    }
    if (filter.min_run > 1) {
        std::size_t i = 0;
        while (i < n) {
            if (!out[i]) {
                ++i;
                continue;
            }
            const std::size_t run_start = i;
            while (i < n && out[i]) ++i;
            if (i - run_start < static_cast<std::size_t>(filter.min_run))
                std::fill(out.begin() + static_cast<std::ptrdiff_t>(run_start), out.begin() + static_cast<std::ptrdiff_t>(i), 0);
        }
    }
    return out;
}

std::vector<FrameCoverage> temporal_filter(std::span<const FrameCoverage> series, std::int64_t frame_count,
                                           const TemporalFilter& filter) {
    filter.validate();
    std::vector<FrameCoverage> kept;
    if (filter.identity()) {
        for (const auto& fc : series)
            if (fc.visible || fc.detection_count > 0) kept.push_back(fc);
        return kept;
    }
    if (frame_count <= 0) throw ConfigError("frame count must be positive");

    const auto n = static_cast<std::size_t>(frame_count);
    std::vector<std::uint8_t> z(n, 0);
    std::vector<const FrameCoverage*> by_frame(n, nullptr);
    int brand = series.empty() ? 0 : series.front().brand_id;
    for (const auto& fc : series) {
        if (fc.frame_index < 1 || fc.frame_index > frame_count)
            throw DataError("frame " + std::to_string(fc.frame_index) + " outside 1.." + std::to_string(frame_count));
        const auto idx = static_cast<std::size_t>(fc.frame_index - 1);
        by_frame[idx] = &fc;
        z[idx] = fc.visible ? 1 : 0;
    }
    const auto filtered = temporal_filter(z, filter);
    for (std::size_t i = 0; i < n; ++i) {
        if (!filtered[i]) continue;
        if (z[i]) {
            kept.push_back(*by_frame[i]);
        } else {
            FrameCoverage fc;
            fc.frame_index = static_cast<std::int64_t>(i) + 1;
            fc.brand_id = brand;
            fc.visible = true;
            fc.bridged = true;
            kept.push_back(fc);
        }
    }
    return kept;
}

ExposureTimeline build_timeline(std::span<const FrameCoverage> coverages, const FrameMeta& frame, std::size_t top_k) {
    if (top_k < 1) throw ConfigError("top-K must be >= 1");
    std::map<int, std::vector<FrameCoverage>> per_brand;
    for (const auto& fc : coverages) per_brand[fc.brand_id].push_back(fc);

    ExposureTimeline out;
    std::vector<BrandMetrics> all;
    for (auto& [brand, series] : per_brand) {
        std::sort(series.begin(), series.end(),
                  [](const FrameCoverage& a, const FrameCoverage& b) { return a.frame_index < b.frame_index; });
        auto& points = out.series[brand];
        for (const auto& fc : series) {
            if (fc.visible) points.push_back(TimelinePoint{fc.frame_index, fc.coverage, fc.bridged});
        }
        all.push_back(aggregate_brand(brand, series, frame));
    }
    std::sort(all.begin(), all.end(), ranks_before);
    if (all.size() > top_k) all.resize(top_k);
    out.ranking = std::move(all);
    return out;
}

ExposureAccumulator::ExposureAccumulator(MetaLookup lookup, AnalyzeOptions options)
    : lookup_(std::move(lookup)), options_(std::move(options)) {
    options_.filter.validate();
    if (options_.top_k < 1) throw ConfigError("top-K must be >= 1");
    if (!(options_.conf_threshold >= 0.0 && options_.conf_threshold <= 1.0))
        throw ConfigError("confidence threshold must lie in [0, 1]");
}

void ExposureAccumulator::add_batch(std::span<const Detection> batch) {
    // Resolve geometry up front so workers only read shared state.
    std::vector<Video*> video_of(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& id = batch[i].video_id;
        auto it = videos_.find(id);
        if (it == videos_.end()) {
            Video v;
            v.meta = lookup_(id);
            v.infer_frames = v.meta.frame_count <= 0;
            v.meta.validate(false);
            if (!(v.meta.frame_rate > 0)) throw ConfigError("frame rate must be positive for video " + id);
            it = videos_.emplace(id, std::move(v)).first;
        }
        video_of[i] = &it->second;
    }

    areas_.assign(batch.size(), 0.0);
    parallel_for(batch.size(), options_.jobs, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            if (batch[i].confidence < options_.conf_threshold) continue;
            areas_[i] = clipped_area(batch[i].quad, video_of[i]->meta);
        }
    });

    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& det = batch[i];
        if (det.confidence < options_.conf_threshold) {
            ++below_threshold_;
            continue;
        }
        Video& v = *video_of[i];
        if (!v.infer_frames && det.frame_index > v.meta.frame_count)
            throw DataError("frame " + std::to_string(det.frame_index) + " beyond frame count of video " + det.video_id);
        v.max_frame = std::max(v.max_frame, det.frame_index);
        Cell& cell = v.cells[{det.class_id, det.frame_index}];
        cell.area += areas_[i];
        ++cell.count;
        ++used_;
    }
}

std::vector<VideoReport> ExposureAccumulator::finish() const {
    std::vector<VideoReport> reports;
    for (const auto& [id, video] : videos_) {
        VideoReport rep;
        rep.video_id = id;
        rep.meta = video.meta;
        if (video.infer_frames) {
            rep.meta.frame_count = video.max_frame;
            rep.inferred_frame_count = true;
        }
        if (video.cells.empty()) {
            reports.push_back(std::move(rep));
            continue;
        }

        std::vector<FrameCoverage> all;
        auto it = video.cells.begin();
        while (it != video.cells.end()) {
            const int brand = it->first.first;
            std::vector<FrameCoverage> series;
            for (; it != video.cells.end() && it->first.first == brand; ++it) {
                series.push_back(coverage_from_area(it->second.area, it->second.count, rep.meta, it->first.second, brand));
            }
            auto filtered = temporal_filter(series, rep.meta.frame_count, options_.filter);
            rep.brands.push_back(aggregate_brand(brand, filtered, rep.meta));
            all.insert(all.end(), filtered.begin(), filtered.end());
        }
        std::sort(rep.brands.begin(), rep.brands.end(), ranks_before);
        rep.timeline = build_timeline(all, rep.meta, options_.top_k);
        reports.push_back(std::move(rep));
    }
    return reports;
}

}  // namespace exposure::metrics
