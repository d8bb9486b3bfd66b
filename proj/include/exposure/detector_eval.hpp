// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

// Detector evaluation against ground truth with rotated or axis-aligned IoU.
//
// Matching is greedy and class-exact: within a frame, predictions of a class
// are visited by descending confidence and each claims the still-unmatched
// ground truth of that class with the highest IoU at or above the threshold.
// AP uses the monotone precision envelope integrated over recall.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "exposure/records.hpp"

namespace exposure::eval {

enum class BoxMode { Obb, Hbb };
enum class Interpolation { AllPoints, ElevenPoint };

BoxMode parse_box_mode(std::string_view s);
const char* to_string(BoxMode m);
Interpolation parse_interpolation(std::string_view s);
const char* to_string(Interpolation i);

inline const std::vector<double> kDefaultHistogramThresholds = {0.5, 0.6, 0.7, 0.8, 0.9};

struct MatchRecord {
    std::size_t frame = 0;       ///< frame ordinal within the evaluation
    std::size_t pred_index = 0;  ///< index into the frame's predictions
    std::optional<std::size_t> gt_index;
    double iou = 0.0;  ///< matched IoU for TPs; best same-class IoU otherwise
    bool tp = false;
    int class_id = 0;
    double confidence = 0.0;
};

struct FrameMatch {
    std::vector<MatchRecord> records;  ///< in prediction input order
    std::map<int, std::size_t> gt_per_class;
    std::size_t dropped_preds = 0;
    std::size_t dropped_gts = 0;
    std::vector<std::string> audit;
};

/// IoU of two boxes in the given mode. Hbb compares enclosing rectangles.
double box_iou(const Quad& a, const Quad& b, BoxMode mode);

/// Degenerate boxes on either side are dropped and noted in `audit`.
FrameMatch match_frame(std::span<const Detection> preds, std::span<const GroundTruth> gts, double iou_threshold,
                       BoxMode mode, std::size_t frame = 0);

/// AP of one class's records, in any order. The PR curve has one point per
/// distinct confidence. nullopt when total_gt == 0.
std::optional<double> average_precision(std::span<const MatchRecord> records, std::size_t total_gt,
                                        Interpolation interp = Interpolation::AllPoints);

struct IouHistogram {
    std::vector<double> thresholds;
    std::vector<double> fractions;
    std::size_t count = 0;
};

/// Fraction of the given predictions that are TPs with IoU >= t, per t.
IouHistogram iou_threshold_histogram(std::span<const MatchRecord> records,
                                     std::span<const double> thresholds = kDefaultHistogramThresholds);

struct EvalFrame {
    std::string frame_id;
    std::vector<Detection> preds;
    std::vector<GroundTruth> gts;
};

struct EvalConfig {
    double iou_threshold = 0.5;
    BoxMode box_mode = BoxMode::Obb;
    Interpolation interpolation = Interpolation::AllPoints;
    /// Fixed confidence operating point for precision/recall; the max-F1
    /// point over the pooled PR curve when unset.
    std::optional<double> conf_threshold;
    std::vector<double> histogram_thresholds = kDefaultHistogramThresholds;

    void validate() const;
};

struct ClassEval {
    int class_id = 0;
    std::size_t n_gt = 0;
    std::size_t n_pred = 0;
    std::size_t n_tp = 0;
    std::optional<double> ap;
};

struct EvalResult {
    double iou_threshold = 0.5;
    BoxMode box_mode = BoxMode::Obb;
    Interpolation interpolation = Interpolation::AllPoints;
    std::map<int, double> per_class_ap;  ///< classes with at least one ground truth
    std::vector<ClassEval> classes;
    double map50 = 0.0;  ///< mAP at iou_threshold
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::optional<double> operating_confidence;
    IouHistogram iou_histogram;
    std::size_t n_frames = 0;
    std::size_t n_gt = 0;
    std::size_t n_pred = 0;
    std::size_t dropped_preds = 0;
    std::size_t dropped_gts = 0;
    std::vector<std::string> audit;
    std::vector<MatchRecord> records;
};

/// Throws DataError when no frame carries usable ground truth.
EvalResult evaluate(std::span<const EvalFrame> frames, const EvalConfig& config = {});

/// Mean of mAP over several IoU thresholds (e.g. 0.50:0.05:0.95).
double map_over_thresholds(std::span<const EvalFrame> frames, EvalConfig config, std::span<const double> thresholds);

}  // namespace exposure::eval
