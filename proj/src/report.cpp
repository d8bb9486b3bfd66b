// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

#include "exposure/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <iterator>
#include <limits>
#include <sstream>

namespace exposure::report {

using json = nlohmann::ordered_json;

Format parse_format(std::string_view s) {
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    throw ConfigError("format must be csv or json");
}

const char* extension(Format f) { return f == Format::Csv ? "csv" : "json"; }

std::string format_number(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("cannot serialize a non-finite number");
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

double parse_number(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError(ParseErrorKind::NonNumeric, 0, std::string(s));
    return v;
}

namespace {

std::int64_t parse_int(std::string_view s) {
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError(ParseErrorKind::NonNumeric, 0, std::string(s));
    return v;
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void write_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

json with_config(const Header& config) {
    json root = json::object();
    if (!config.is_null() && !config.empty()) root["config"] = config;
    return root;
}

std::string read_all(std::istream& in) {
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void expect_header(const std::vector<std::vector<std::string>>& rows, const std::vector<std::string>& header) {
    if (rows.empty() || rows.front() != header) throw ParseError(ParseErrorKind::Malformed, 1, "unexpected CSV header");
}

const std::vector<std::string> kBrandHeader = {"video_id", "brand_id", "brand", "exposure_s", "avg_cov_present_pct",
                                               "avg_cov_overall_pct", "max_cov_pct", "detection_count", "appearances"};

const std::vector<std::string> kTRBinHeader = {"source", "bin_width_deg", "bin_lo", "bin_hi", "n", "mean_tr",
                                               "ci95_half_width"};

}  // namespace

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_row(std::span<const std::string> fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_field(fields[i]);
    }
    out += '\n';
    return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !field.empty()) {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            field.clear();
            row.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (quoted) throw ParseError(ParseErrorKind::Malformed, rows.size() + 1, "unterminated quoted CSV field");
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_brand_metrics(std::ostream& out, std::span<const BrandRow> rows, Format format, const Header& config) {
    if (format == Format::Csv) {
        out << csv_row(kBrandHeader);
        for (const auto& r : rows) {
            const auto& m = r.metrics;
            const std::vector<std::string> f = {r.video_id,
                                                std::to_string(m.brand_id),
                                                r.brand,
                                                format_number(m.exposure_s),
                                                format_number(m.avg_cov_present_pct),
                                                format_number(m.avg_cov_overall_pct),
                                                format_number(m.max_cov_pct),
                                                std::to_string(m.detection_count),
                                                std::to_string(m.appearances)};
            out << csv_row(f);
        }
        return;
    }
    json root = with_config(config);
    json list = json::array();
    for (const auto& r : rows) {
        const auto& m = r.metrics;
        json j;
        j["video_id"] = r.video_id;
        j["brand_id"] = m.brand_id;
        j["brand"] = r.brand;
        j["exposure_s"] = m.exposure_s;
        j["avg_cov_present_pct"] = m.avg_cov_present_pct;
        j["avg_cov_overall_pct"] = m.avg_cov_overall_pct;
        j["max_cov_pct"] = m.max_cov_pct;
        j["detection_count"] = m.detection_count;
        j["appearances"] = m.appearances;
        list.push_back(std::move(j));
    }
    root["brands"] = std::move(list);
    write_json(out, root);
}

std::vector<BrandRow> read_brand_metrics(std::istream& in, Format format) {
    std::vector<BrandRow> rows;
    if (format == Format::Csv) {
        const auto table = parse_csv(read_all(in));
        expect_header(table, kBrandHeader);
        for (std::size_t i = 1; i < table.size(); ++i) {
            const auto& f = table[i];
            if (f.size() != kBrandHeader.size()) throw ParseError(ParseErrorKind::FieldCount, i + 1, "brand metrics row");
            BrandRow r;
            r.video_id = f[0];
            r.metrics.brand_id = static_cast<int>(parse_int(f[1]));
            r.brand = f[2];
            r.metrics.exposure_s = parse_number(f[3]);
            r.metrics.avg_cov_present_pct = parse_number(f[4]);
            r.metrics.avg_cov_overall_pct = parse_number(f[5]);
            r.metrics.max_cov_pct = parse_number(f[6]);
            r.metrics.detection_count = parse_int(f[7]);
            r.metrics.appearances = parse_int(f[8]);
            rows.push_back(std::move(r));
        }
        return rows;
    }
    const json root = json::parse(in);
    for (const auto& j : root.at("brands")) {
        BrandRow r;
        r.video_id = j.at("video_id").get<std::string>();
        r.metrics.brand_id = j.at("brand_id").get<int>();
        r.brand = j.at("brand").get<std::string>();
        r.metrics.exposure_s = j.at("exposure_s").get<double>();
        r.metrics.avg_cov_present_pct = j.at("avg_cov_present_pct").get<double>();
        r.metrics.avg_cov_overall_pct = j.at("avg_cov_overall_pct").get<double>();
        r.metrics.max_cov_pct = j.at("max_cov_pct").get<double>();
        r.metrics.detection_count = j.at("detection_count").get<std::int64_t>();
        r.metrics.appearances = j.at("appearances").get<std::int64_t>();
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_ranking(std::ostream& out, std::span<const RankingRow> rows, Format format, const Header& config) {
    if (format == Format::Csv) {
        out << csv_row(std::vector<std::string>{"video_id", "rank", "brand_id", "brand", "exposure_s"});
        for (const auto& r : rows) {
            out << csv_row(std::vector<std::string>{r.video_id, std::to_string(r.rank), std::to_string(r.brand_id),
                                                    r.brand, format_number(r.exposure_s)});
        }
        return;
    }
    json root = with_config(config);
    json list = json::array();
    for (const auto& r : rows) {
        json j;
        j["video_id"] = r.video_id;
        j["rank"] = r.rank;
        j["brand_id"] = r.brand_id;
        j["brand"] = r.brand;
        j["exposure_s"] = r.exposure_s;
        list.push_back(std::move(j));
    }
    root["ranking"] = std::move(list);
    write_json(out, root);
}

void write_timeline_csv(std::ostream& out, std::span<const TimelineRow> rows) {
    out << csv_row(std::vector<std::string>{"video_id", "brand_id", "brand", "frame_index", "time_s", "coverage",
                                            "bridged"});
    for (const auto& r : rows) {
        out << csv_row(std::vector<std::string>{r.video_id, std::to_string(r.brand_id), r.brand,
                                                std::to_string(r.frame_index), format_number(r.time_s),
                                                format_number(r.coverage), r.bridged ? "1" : "0"});
    }
}

void write_eval_result(std::ostream& out, const eval::EvalResult& result, Format format, const ClassMap* classes,
                       const Header& config) {
    auto class_name = [&](int id) { return classes && classes->contains(id) ? classes->name(id) : std::string(); };
    if (format == Format::Csv) {
        out << csv_row(std::vector<std::string>{"class_id", "class_name", "n_gt", "n_pred", "n_tp", "ap"});
        for (const auto& c : result.classes) {
            out << csv_row(std::vector<std::string>{std::to_string(c.class_id), class_name(c.class_id),
                                                    std::to_string(c.n_gt), std::to_string(c.n_pred),
                                                    std::to_string(c.n_tp), opt_number(c.ap)});
        }
        return;
    }
    json root = with_config(config);
    root["iou_threshold"] = result.iou_threshold;
    root["box_mode"] = eval::to_string(result.box_mode);
    root["interpolation"] = eval::to_string(result.interpolation);
    root["map50"] = result.map50;
    root["precision"] = result.precision;
    root["recall"] = result.recall;
    root["f1"] = result.f1;
    root["operating_confidence"] = opt_json(result.operating_confidence);
    json ap = json::object();
    for (const auto& [cls, v] : result.per_class_ap) ap[std::to_string(cls)] = v;
    root["per_class_ap"] = std::move(ap);
    json cls_list = json::array();
    for (const auto& c : result.classes) {
        json j;
        j["class_id"] = c.class_id;
        j["class_name"] = class_name(c.class_id);
        j["n_gt"] = c.n_gt;
        j["n_pred"] = c.n_pred;
        j["n_tp"] = c.n_tp;
        j["ap"] = opt_json(c.ap);
        cls_list.push_back(std::move(j));
    }
    root["classes"] = std::move(cls_list);
    json hist = json::object();
    for (std::size_t i = 0; i < result.iou_histogram.thresholds.size(); ++i)
        hist[format_number(result.iou_histogram.thresholds[i])] = result.iou_histogram.fractions[i];
    root["iou_histogram"] = std::move(hist);
    root["iou_histogram_count"] = result.iou_histogram.count;
    json counts;
    counts["frames"] = result.n_frames;
    counts["ground_truth"] = result.n_gt;
    counts["predictions"] = result.n_pred;
    counts["dropped_predictions"] = result.dropped_preds;
    counts["dropped_ground_truth"] = result.dropped_gts;
    root["counts"] = std::move(counts);
    write_json(out, root);
}

void write_eval_summary_csv(std::ostream& out, const eval::EvalResult& result) {
    out << csv_row(std::vector<std::string>{"key", "value"});
    auto row = [&](const char* k, const std::string& v) { out << csv_row(std::vector<std::string>{k, v}); };
    row("iou_threshold", format_number(result.iou_threshold));
    row("box_mode", eval::to_string(result.box_mode));
    row("interpolation", eval::to_string(result.interpolation));
    row("map50", format_number(result.map50));
    row("precision", format_number(result.precision));
    row("recall", format_number(result.recall));
    row("f1", format_number(result.f1));
    row("operating_confidence", opt_number(result.operating_confidence));
    row("frames", std::to_string(result.n_frames));
    row("ground_truth", std::to_string(result.n_gt));
    row("predictions", std::to_string(result.n_pred));
}

void write_iou_histogram_csv(std::ostream& out, const eval::IouHistogram& hist) {
    out << csv_row(std::vector<std::string>{"iou_threshold", "fraction", "count"});
    for (std::size_t i = 0; i < hist.thresholds.size(); ++i) {
        out << csv_row(std::vector<std::string>{format_number(hist.thresholds[i]), format_number(hist.fractions[i]),
                                                std::to_string(hist.count)});
    }
}

eval::EvalResult read_eval_result_json(std::istream& in) {
    const json root = json::parse(in);
    eval::EvalResult r;
    r.iou_threshold = root.at("iou_threshold").get<double>();
    r.box_mode = eval::parse_box_mode(root.at("box_mode").get<std::string>());
    r.interpolation = root.at("interpolation").get<std::string>() == "11-point" ? eval::Interpolation::ElevenPoint
                                                                                 : eval::Interpolation::AllPoints;
    r.map50 = root.at("map50").get<double>();
    r.precision = root.at("precision").get<double>();
    r.recall = root.at("recall").get<double>();
    r.f1 = root.at("f1").get<double>();
    if (!root.at("operating_confidence").is_null()) r.operating_confidence = root["operating_confidence"].get<double>();
    for (const auto& [k, v] : root.at("per_class_ap").items()) r.per_class_ap[std::stoi(k)] = v.get<double>();
    for (const auto& j : root.at("classes")) {
        eval::ClassEval c;
        c.class_id = j.at("class_id").get<int>();
        c.n_gt = j.at("n_gt").get<std::size_t>();
        c.n_pred = j.at("n_pred").get<std::size_t>();
        c.n_tp = j.at("n_tp").get<std::size_t>();
        if (!j.at("ap").is_null()) c.ap = j["ap"].get<double>();
        r.classes.push_back(c);
    }
    for (const auto& [k, v] : root.at("iou_histogram").items()) {
        r.iou_histogram.thresholds.push_back(parse_number(k));
        r.iou_histogram.fractions.push_back(v.get<double>());
    }
    r.iou_histogram.count = root.at("iou_histogram_count").get<std::size_t>();
    const auto& counts = root.at("counts");
    r.n_frames = counts.at("frames").get<std::size_t>();
    r.n_gt = counts.at("ground_truth").get<std::size_t>();
    r.n_pred = counts.at("predictions").get<std::size_t>();
    r.dropped_preds = counts.at("dropped_predictions").get<std::size_t>();
    r.dropped_gts = counts.at("dropped_ground_truth").get<std::size_t>();
    return r;
}

void write_tr_bins(std::ostream& out, std::span<const TRBinRow> rows, Format format, const Header& config) {
    if (format == Format::Csv) {
        out << csv_row(kTRBinHeader);
        for (const auto& r : rows) {
            out << csv_row(std::vector<std::string>{r.source, format_number(r.bin_width_deg), format_number(r.stat.lo),
                                                    format_number(r.stat.hi), std::to_string(r.stat.n),
                                                    r.stat.n ? format_number(r.stat.mean_tr) : std::string(),
                                                    opt_number(r.stat.ci95_half_width)});
        }
        return;
    }
    json root = with_config(config);
    json list = json::array();
    for (const auto& r : rows) {
        json j;
        j["source"] = r.source;
        j["bin_width_deg"] = r.bin_width_deg;
        j["bin_lo"] = r.stat.lo;
        j["bin_hi"] = r.stat.hi;
        j["n"] = r.stat.n;
        j["mean_tr"] = r.stat.n ? json(r.stat.mean_tr) : json(nullptr);
        j["ci95_half_width"] = opt_json(r.stat.ci95_half_width);
        list.push_back(std::move(j));
    }
    root["bins"] = std::move(list);
    write_json(out, root);
}

std::vector<TRBinRow> read_tr_bins(std::istream& in, Format format) {
    std::vector<TRBinRow> rows;
    if (format == Format::Csv) {
        const auto table = parse_csv(read_all(in));
        expect_header(table, kTRBinHeader);
        for (std::size_t i = 1; i < table.size(); ++i) {
            const auto& f = table[i];
            if (f.size() != kTRBinHeader.size()) throw ParseError(ParseErrorKind::FieldCount, i + 1, "TR bin row");
            TRBinRow r;
            r.source = f[0];
            r.bin_width_deg = parse_number(f[1]);
            r.stat.lo = parse_number(f[2]);
            r.stat.hi = parse_number(f[3]);
            r.stat.n = static_cast<std::size_t>(parse_int(f[4]));
            if (!f[5].empty()) r.stat.mean_tr = parse_number(f[5]);
            if (!f[6].empty()) r.stat.ci95_half_width = parse_number(f[6]);
            rows.push_back(std::move(r));
        }
        return rows;
    }
    const json root = json::parse(in);
    for (const auto& j : root.at("bins")) {
        TRBinRow r;
        r.source = j.at("source").get<std::string>();
        r.bin_width_deg = j.at("bin_width_deg").get<double>();
        r.stat.lo = j.at("bin_lo").get<double>();
        r.stat.hi = j.at("bin_hi").get<double>();
        r.stat.n = j.at("n").get<std::size_t>();
        if (!j.at("mean_tr").is_null()) r.stat.mean_tr = j["mean_tr"].get<double>();
        if (!j.at("ci95_half_width").is_null()) r.stat.ci95_half_width = j["ci95_half_width"].get<double>();
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_tr_gaps(std::ostream& out, const tightness::TRComparison& cmp, Format format, const Header& config) {
    if (format == Format::Csv) {
        out << csv_row(std::vector<std::string>{"bin_lo", "bin_hi", "n_gt", "n_pred", "gt_mean", "pred_mean", "abs_gap"});
        for (const auto& r : cmp.rows) {
            out << csv_row(std::vector<std::string>{format_number(r.lo), format_number(r.hi), std::to_string(r.n_gt),
                                                    std::to_string(r.n_pred), opt_number(r.gt_mean),
                                                    opt_number(r.pred_mean), opt_number(r.abs_gap)});
        }
        return;
    }
    json root = with_config(config);
    root["bin_width_deg"] = cmp.bin_width_deg;
    json list = json::array();
    for (const auto& r : cmp.rows) {
        json j;
        j["bin_lo"] = r.lo;
        j["bin_hi"] = r.hi;
        j["n_gt"] = r.n_gt;
        j["n_pred"] = r.n_pred;
        j["gt_mean"] = opt_json(r.gt_mean);
        j["pred_mean"] = opt_json(r.pred_mean);
        j["abs_gap"] = opt_json(r.abs_gap);
        list.push_back(std::move(j));
    }
    root["bins"] = std::move(list);
    root["mean_abs_gap"] = opt_json(cmp.mean_abs_gap);
    write_json(out, root);
}

}  // namespace exposure::report
