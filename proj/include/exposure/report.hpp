// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

// Report serialization. CSV follows RFC 4180 quoting; JSON objects keep a
// fixed key order. Numbers are written in shortest round-trip form, so every
// reader here reproduces the written values exactly.

#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "exposure/detector_eval.hpp"
#include "exposure/exposure_metrics.hpp"
#include "exposure/tightness.hpp"

namespace exposure::report {

enum class Format { Csv, Json };

Format parse_format(std::string_view s);
const char* extension(Format f);

using Header = nlohmann::ordered_json;

std::string format_number(double v);
double parse_number(std::string_view s);

std::string csv_field(std::string_view s);
std::string csv_row(std::span<const std::string> fields);
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

struct BrandRow {
    std::string video_id;
    std::string brand;  ///< class name, empty without a class map
    metrics::BrandMetrics metrics;

    friend bool operator==(const BrandRow&, const BrandRow&) = default;
};

void write_brand_metrics(std::ostream& out, std::span<const BrandRow> rows, Format format, const Header& config = {});
std::vector<BrandRow> read_brand_metrics(std::istream& in, Format format);

struct RankingRow {
    std::string video_id;
    std::size_t rank = 0;
    int brand_id = 0;
    std::string brand;
    double exposure_s = 0.0;
};

void write_ranking(std::ostream& out, std::span<const RankingRow> rows, Format format, const Header& config = {});

struct TimelineRow {
    std::string video_id;
    int brand_id = 0;
    std::string brand;
    std::int64_t frame_index = 0;
    double time_s = 0.0;  ///< start of the frame, (i - 1) / r
    double coverage = 0.0;
    bool bridged = false;
};

void write_timeline_csv(std::ostream& out, std::span<const TimelineRow> rows);

/// JSON: one object with the per-class AP map, scalar mAP and histogram.
/// CSV: the per-class table only (see write_eval_summary_csv).
void write_eval_result(std::ostream& out, const eval::EvalResult& result, Format format,
                       const ClassMap* classes = nullptr, const Header& config = {});
void write_eval_summary_csv(std::ostream& out, const eval::EvalResult& result);
void write_iou_histogram_csv(std::ostream& out, const eval::IouHistogram& hist);
eval::EvalResult read_eval_result_json(std::istream& in);

struct TRBinRow {
    std::string source;
    double bin_width_deg = 15.0;
    tightness::TRBinStat stat;
};

void write_tr_bins(std::ostream& out, std::span<const TRBinRow> rows, Format format, const Header& config = {});
std::vector<TRBinRow> read_tr_bins(std::istream& in, Format format);

void write_tr_gaps(std::ostream& out, const tightness::TRComparison& cmp, Format format, const Header& config = {});

}  // namespace exposure::report
