// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

// Readers for the on-disk formats: OBB label files, JSON-lines detection
// streams, class maps, frame metadata sidecars and dataset split layouts.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exposure/errors.hpp"
#include "exposure/records.hpp"

namespace exposure::ingest {

/// Tolerance on normalized label coordinates outside [0, 1].
inline constexpr double kLabelRangeTolerance = 1e-6;

/// Significant digits used when writing normalized label coordinates.
inline constexpr int kLabelDigits = 9;

/// One rejected or flagged input record.
struct Issue {
    std::size_t line = 0;
    ParseErrorKind kind = ParseErrorKind::Malformed;
    std::string message;
};

/// Per-source accounting: accepted + skipped == total.
struct IngestStats {
    std::size_t total = 0;
    std::size_t accepted = 0;
    std::size_t skipped = 0;
    std::size_t degenerate = 0;  ///< accepted but flagged (labels only)
    std::vector<Issue> issues;   ///< first kMaxIssues only

    static constexpr std::size_t kMaxIssues = 1000;
    void record(const ParseError& e);
    void merge(const IngestStats& other);
};

/// Parses "class_id x1 y1 x2 y2 x3 y3 x4 y4" with coordinates normalized to
/// [0, 1], denormalizes to pixels of `img` and canonicalizes the quad.
/// Degenerate quads are returned flagged, not rejected.
GroundTruth parse_obb_label_line(std::string_view line, const FrameMeta& img, std::size_t line_no = 0,
                                 const ClassMap* classes = nullptr, std::string frame_id = {});

/// Inverse of parse_obb_label_line at kLabelDigits significant digits.
std::string format_obb_label_line(const GroundTruth& gt, const FrameMeta& img);

struct LabelFile {
    std::vector<GroundTruth> labels;
    IngestStats stats;
};

/// Reads every non-blank line of a label file. In strict mode the first
/// malformed line throws ParseError; otherwise it is skipped and recorded.
LabelFile read_label_file(const std::filesystem::path& path, std::string frame_id, const FrameMeta& img,
                          const ClassMap* classes, bool strict);

/// Parses one JSON detection record:
///   {"video_id": str, "frame": int >= 1, "class": int | str,
///    "poly": [[x, y] x 4] (pixels), "conf": number in [0, 1]}
/// Degenerate quads are returned flagged; the stream reader decides policy.
Detection parse_detection_record(std::string_view line, std::size_t line_no = 0,
                                 const ClassMap* classes = nullptr);

/// Serializes a detection as one JSON line; parse_detection_record reads it back.
std::string format_detection_record(const Detection& det);

struct DetectionReaderOptions {
    bool strict = false;
    const ClassMap* classes = nullptr;
    /// Frame count for a video id, when known; frames must then lie in [1, N].
    std::function<std::optional<std::int64_t>(const std::string&)> frame_count;
};

/// Single-pass, order-preserving reader over a JSON-lines stream. Holds one
/// line at a time. Invalid records are skipped and recorded, or rethrown in
/// strict mode; degenerate quads count as invalid.
class DetectionReader {
public:
    DetectionReader(std::istream& in, DetectionReaderOptions options = {});

    std::optional<Detection> next();
    const IngestStats& stats() const { return stats_; }

private:
    std::istream& in_;
    DetectionReaderOptions options_;
    IngestStats stats_;
    std::size_t line_no_ = 0;
    std::string line_;
};

std::vector<Detection> parse_detections_stream(std::istream& in, const DetectionReaderOptions& options = {},
                                               IngestStats* stats = nullptr);

enum class Split { Train, Val, Test };

Split parse_split(std::string_view name);
const char* to_string(Split split);

struct SplitItem {
    std::string stem;
    std::optional<std::filesystem::path> image;
    std::optional<std::filesystem::path> label;
};

struct SplitListing {
    std::vector<SplitItem> items;  ///< sorted by stem
    std::vector<std::string> warnings;
};

/// Pairs <root>/<split>/images/* with <root>/<split>/labels/*.txt by stem.
/// Images without labels are kept as background frames. Labels without an
/// image are kept with a warning, or excluded in strict mode.
SplitListing load_split(const std::filesystem::path& root, Split split, bool strict);

/// Frame metadata sidecar. Accepts either a single object
///   {"width": W, "height": H, "fps": r, "frames": N}
/// used for every video, or {"videos": [{"video_id": ..., ...}, ...]},
/// optionally with a top-level default alongside.
struct MetaTable {
    std::optional<FrameMeta> fallback;
    std::map<std::string, FrameMeta> per_video;

    std::optional<FrameMeta> lookup(const std::string& video_id) const;
    static MetaTable load(const std::filesystem::path& path);
};

}  // namespace exposure::ingest
