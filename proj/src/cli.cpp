// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

#include "exposure/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "exposure/exposure_metrics.hpp"
#include "exposure/ingest.hpp"
#include "exposure/loss_check.hpp"
#include "exposure/parallel.hpp"
#include "exposure/tightness.hpp"

namespace exposure::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr std::size_t kBatchSize = 1 << 16;
constexpr std::size_t kMaxReportedWarnings = 200;

std::shared_ptr<spdlog::logger> logger() {
    static const auto instance = [] {
        auto l = spdlog::stderr_color_mt("exposure");
        l->set_pattern("[%l] %v");
        spdlog::level::level_enum level = spdlog::level::warn;
        if (const char* env = std::getenv("EXPOSURE_LOG")) {
            level = spdlog::level::from_str(env);
            // from_str maps unknown names to "off"; keep warnings instead.
            if (level == spdlog::level::off && std::string(env) != "off") level = spdlog::level::warn;
        }
        l->set_level(level);
        return l;
    }();
    return instance;
}

std::string iso_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::ofstream open_output(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path.string());
    return f;
}

void prepare_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir.string());
}

std::optional<ClassMap> load_classes(const RunConfig& c) {
    if (!c.classes) return std::nullopt;
    return ClassMap::load(*c.classes);
}

std::string brand_name(const std::optional<ClassMap>& classes, int id) {
    return classes && classes->contains(id) ? classes->name(id) : std::string();
}

/// Frame metadata from the sidecar file, with flag overrides on top.
class MetaResolver {
public:
    explicit MetaResolver(const RunConfig& c) : config_(c) {
        if (c.meta) table_ = ingest::MetaTable::load(*c.meta);
    }

    std::optional<FrameMeta> find(const std::string& id) const {
        std::optional<FrameMeta> m = table_ ? table_->lookup(id) : std::nullopt;
        if (!m && !(config_.width || config_.height || config_.fps || config_.frames)) return std::nullopt;
        FrameMeta out = m.value_or(FrameMeta{});
        if (config_.width) out.width = *config_.width;
        if (config_.height) out.height = *config_.height;
        if (config_.fps) out.frame_rate = *config_.fps;
        if (config_.frames) out.frame_count = *config_.frames;
        return out;
    }

    FrameMeta require(const std::string& id, bool timed) const {
        const auto m = find(id);
        if (!m) throw ConfigError("no frame metadata for '" + id + "'; pass --meta or --width/--height" +
                                  std::string(timed ? "/--fps" : ""));
        m->validate(false);
        if (timed && !(m->frame_rate > 0)) throw ConfigError("no frame rate for '" + id + "'; pass --fps or --meta");
        return *m;
    }

private:
    const RunConfig& config_;
    std::optional<ingest::MetaTable> table_;
};

/// Holds an ifstream, or borrows std::cin for "-".
class InputStream {
public:
    explicit InputStream(const fs::path& path) {
        if (path == "-") return;
        file_.open(path, std::ios::binary);
        if (!file_) throw ConfigError("cannot open " + path.string());
    }
    std::istream& get() { return file_.is_open() ? static_cast<std::istream&>(file_) : std::cin; }

private:
    std::ifstream file_;
};

void warn_issues(const std::string& source, const ingest::IngestStats& stats) {
    if (stats.skipped == 0 && stats.degenerate == 0) return;
    if (stats.skipped > 0) logger()->warn("{}: {} of {} records skipped", source, stats.skipped, stats.total);
    if (stats.degenerate > 0) logger()->warn("{}: {} degenerate boxes kept", source, stats.degenerate);
    for (std::size_t i = 0; i < stats.issues.size() && i < 10; ++i) logger()->info("  {}", stats.issues[i].message);
}

json stats_json(const ingest::IngestStats& s) {
    json j;
    j["total"] = s.total;
    j["accepted"] = s.accepted;
    j["skipped"] = s.skipped;
    j["degenerate"] = s.degenerate;
    return j;
}

void write_run_report(const RunConfig& c, json inputs, const std::vector<std::string>& warnings, json result,
                      const Stopwatch& clock) {
    json rep;
    rep["command"] = c.command;
    rep["config"] = c.echo();
    rep["jobs"] = resolve_jobs(c.jobs);
    rep["inputs"] = std::move(inputs);
    json w = json::array();
    for (const auto& s : warnings) {
        if (w.size() >= kMaxReportedWarnings) break;
        w.push_back(s);
    }
    rep["warnings"] = std::move(w);
    rep["result"] = std::move(result);
    rep["generated_at"] = iso_now();
    rep["duration_s"] = clock.seconds();
    auto f = open_output(c.out / "run_report.json");
    f << rep.dump(2) << '\n';
}

}  // namespace

report::Header RunConfig::echo() const {
    json j;
    j["command"] = command;
    auto path_or_null = [](const std::optional<fs::path>& p) { return p ? json(p->string()) : json(nullptr); };
    auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
    if (command == "analyze") {
        j["detections"] = path_or_null(detections);
        j["classes"] = path_or_null(classes);
        j["meta"] = path_or_null(meta);
        j["width"] = opt(width);
        j["height"] = opt(height);
        j["fps"] = opt(fps);
        j["frames"] = opt(frames);
        j["conf_threshold"] = conf_threshold.value_or(metrics::kDefaultConfThreshold);
        j["top_k"] = top_k;
        j["min_run"] = min_run;
        j["max_gap"] = max_gap;
    } else if (command == "evaluate") {
        j["detections"] = path_or_null(detections);
        j["labels"] = path_or_null(labels);
        j["split"] = split;
        j["classes"] = path_or_null(classes);
        j["meta"] = path_or_null(meta);
        j["width"] = opt(width);
        j["height"] = opt(height);
        j["iou_threshold"] = iou_threshold;
        j["conf_threshold"] = opt(conf_threshold);
        j["box_mode"] = eval::to_string(box_mode);
        j["ap_interp"] = eval::to_string(interpolation);
    } else if (command == "fit") {
        j["detections"] = path_or_null(detections);
        j["labels"] = path_or_null(labels);
        j["split"] = split;
        j["classes"] = path_or_null(classes);
        j["meta"] = path_or_null(meta);
        j["width"] = opt(width);
        j["height"] = opt(height);
        j["conf_threshold"] = opt(conf_threshold);
        j["bin_widths"] = bin_widths.empty() ? std::vector<double>{15.0, 5.0} : bin_widths;
    } else if (command == "losscheck") {
        j["gamma"] = loss.gamma;
        j["alpha"] = loss.alpha;
    }
    j["strict"] = strict;
    j["format"] = report::extension(format);
    return j;
}

int cmd_analyze(const RunConfig& c, std::ostream& out) {
    const Stopwatch clock;
    if (!c.detections) throw ConfigError("analyze requires --detections");
    const auto classes = load_classes(c);
    const MetaResolver meta(c);
    prepare_out_dir(c.out);

    metrics::AnalyzeOptions options;
    options.conf_threshold = c.conf_threshold.value_or(metrics::kDefaultConfThreshold);
    options.filter = {c.min_run, c.max_gap};
    options.filter.validate();
    options.top_k = c.top_k;
    options.jobs = c.jobs;
    if (options.top_k < 1) throw ConfigError("--top-k must be >= 1");
    if (!(options.conf_threshold >= 0.0 && options.conf_threshold <= 1.0))
        throw ConfigError("--conf-threshold must lie in [0, 1]");

    std::vector<std::string> warnings;
    metrics::ExposureAccumulator acc([&](const std::string& id) { return meta.require(id, true); }, options);

    ingest::DetectionReaderOptions ropts;
    ropts.strict = c.strict;
    ropts.classes = classes ? &*classes : nullptr;
    ropts.frame_count = [&](const std::string& id) -> std::optional<std::int64_t> {
        const auto m = meta.find(id);
        if (m && m->frame_count > 0) return m->frame_count;
        return std::nullopt;
    };

    InputStream input(*c.detections);
    ingest::DetectionReader reader(input.get(), ropts);
    std::vector<Detection> batch;
    batch.reserve(kBatchSize);
    while (auto det = reader.next()) {
        batch.push_back(std::move(*det));
        if (batch.size() == kBatchSize) {
            acc.add_batch(batch);
            batch.clear();
        }
    }
    acc.add_batch(batch);
    const auto& stats = reader.stats();
    warn_issues("detections", stats);
    for (const auto& i : stats.issues) warnings.push_back(i.message);

    const auto videos = acc.finish();
    std::vector<report::BrandRow> brand_rows;
    std::vector<report::RankingRow> ranking_rows;
    std::vector<report::TimelineRow> timeline_rows;
    for (const auto& v : videos) {
        if (v.inferred_frame_count) {
            const auto msg = "video " + v.video_id + ": frame count inferred as " + std::to_string(v.meta.frame_count) +
                             " from the largest frame index";
            logger()->warn("{}", msg);
            warnings.push_back(msg);
        }
        for (const auto& b : v.brands) brand_rows.push_back({v.video_id, brand_name(classes, b.brand_id), b});
        std::size_t rank = 0;
        for (const auto& b : v.timeline.ranking) {
            ranking_rows.push_back({v.video_id, ++rank, b.brand_id, brand_name(classes, b.brand_id), b.exposure_s});
            const auto it = v.timeline.series.find(b.brand_id);
            if (it == v.timeline.series.end()) continue;
            for (const auto& p : it->second) {
                timeline_rows.push_back({v.video_id, b.brand_id, brand_name(classes, b.brand_id), p.frame_index,
                                         static_cast<double>(p.frame_index - 1) / v.meta.frame_rate, p.coverage,
                                         p.bridged});
            }
        }
    }
    if (stats.total == 0) warnings.push_back("no detection records in input");

    const auto ext = std::string(".") + report::extension(c.format);
    const auto header = c.echo();
    {
        auto f = open_output(c.out / ("metrics" + ext));
        report::write_brand_metrics(f, brand_rows, c.format, header);
    }
    {
        auto f = open_output(c.out / ("ranking" + ext));
        report::write_ranking(f, ranking_rows, c.format, header);
    }
    {
        auto f = open_output(c.out / "timeline.csv");
        report::write_timeline_csv(f, timeline_rows);
    }

    json inputs;
    inputs["detections"] = stats_json(stats);
    inputs["detections"]["below_conf_threshold"] = acc.below_threshold();
    inputs["detections"]["used"] = acc.used();
    json result;
    result["videos"] = videos.size();
    result["brand_rows"] = brand_rows.size();
    write_run_report(c, std::move(inputs), warnings, std::move(result), clock);

    for (const auto& r : ranking_rows) {
        out << r.video_id << '\t' << r.rank << '\t' << r.brand_id << '\t' << (r.brand.empty() ? "-" : r.brand) << '\t'
            << report::format_number(r.exposure_s) << "s\n";
    }
    logger()->info("analyze: {} records, {} used, {} videos", stats.total, acc.used(), videos.size());
    return kExitOk;
}

namespace {

struct LabelSet {
    std::vector<eval::EvalFrame> frames;
    std::map<std::string, std::size_t> index;  ///< stem -> frame
    ingest::IngestStats stats;
    std::vector<std::string> warnings;
};

LabelSet load_labels(const RunConfig& c, const MetaResolver& meta, const ClassMap* classes) {
    LabelSet set;
    const auto listing = ingest::load_split(*c.labels, ingest::parse_split(c.split), c.strict);
    set.warnings = listing.warnings;
    for (const auto& w : listing.warnings) logger()->warn("{}", w);
    for (const auto& item : listing.items) {
        eval::EvalFrame frame{item.stem, {}, {}};
        if (item.label) {
            const auto m = meta.require(item.stem, false);
            auto file = ingest::read_label_file(*item.label, item.stem, m, classes, c.strict);
            frame.gts = std::move(file.labels);
            set.stats.merge(file.stats);
        }
        set.index.emplace(item.stem, set.frames.size());
        set.frames.push_back(std::move(frame));
    }
    warn_issues("labels", set.stats);
    for (const auto& i : set.stats.issues) set.warnings.push_back(i.message);
    return set;
}

std::vector<Detection> load_detections(const RunConfig& c, const ClassMap* classes, ingest::IngestStats& stats) {
    ingest::DetectionReaderOptions ropts;
    ropts.strict = c.strict;
    ropts.classes = classes;
    InputStream input(*c.detections);
    auto dets = ingest::parse_detections_stream(input.get(), ropts, &stats);
    warn_issues("detections", stats);
    return dets;
}

}  // namespace

int cmd_evaluate(const RunConfig& c, std::ostream& out) {
    const Stopwatch clock;
    if (!c.detections) throw ConfigError("evaluate requires --detections");
    if (!c.labels) throw ConfigError("evaluate requires --labels");
    eval::EvalConfig ecfg;
    ecfg.iou_threshold = c.iou_threshold;
    ecfg.box_mode = c.box_mode;
    ecfg.interpolation = c.interpolation;
    ecfg.conf_threshold = c.conf_threshold;
    ecfg.validate();
    const auto classes = load_classes(c);
    const ClassMap* cm = classes ? &*classes : nullptr;
    const MetaResolver meta(c);
    prepare_out_dir(c.out);

    auto labels = load_labels(c, meta, cm);
    auto warnings = labels.warnings;
    ingest::IngestStats det_stats;
    auto dets = load_detections(c, cm, det_stats);
    for (const auto& i : det_stats.issues) warnings.push_back(i.message);

    std::size_t unmatched_images = 0;
    for (auto& d : dets) {
        const auto it = labels.index.find(d.video_id);
        if (it == labels.index.end()) {
            ++unmatched_images;
            continue;
        }
        labels.frames[it->second].preds.push_back(std::move(d));
    }
    if (unmatched_images > 0) {
        const auto msg = std::to_string(unmatched_images) + " predictions reference images outside the split";
        if (c.strict) throw DataError(msg);
        logger()->warn("{}", msg);
        warnings.push_back(msg);
    }

    const auto result = eval::evaluate(labels.frames, ecfg);
    for (const auto& a : result.audit) warnings.push_back(a);
    const auto header = c.echo();
    if (c.format == report::Format::Json) {
        auto f = open_output(c.out / "eval.json");
        report::write_eval_result(f, result, c.format, cm, header);
    } else {
        {
            auto f = open_output(c.out / "eval.csv");
            report::write_eval_result(f, result, c.format, cm, header);
        }
        {
            auto f = open_output(c.out / "eval_summary.csv");
            report::write_eval_summary_csv(f, result);
        }
        auto f = open_output(c.out / "iou_histogram.csv");
        report::write_iou_histogram_csv(f, result.iou_histogram);
    }

    json inputs;
    inputs["labels"] = stats_json(labels.stats);
    inputs["labels"]["images"] = labels.frames.size();
    inputs["detections"] = stats_json(det_stats);
    inputs["detections"]["outside_split"] = unmatched_images;
    json res;
    res["map50"] = result.map50;
    res["precision"] = result.precision;
    res["recall"] = result.recall;
    res["f1"] = result.f1;
    res["dropped_preds"] = result.dropped_preds;
    res["dropped_gts"] = result.dropped_gts;
    write_run_report(c, std::move(inputs), warnings, std::move(res), clock);

    out << "mAP@" << report::format_number(result.iou_threshold) << '\t' << report::format_number(result.map50) << '\n'
        << "precision\t" << report::format_number(result.precision) << '\n'
        << "recall\t" << report::format_number(result.recall) << '\n'
        << "f1\t" << report::format_number(result.f1) << '\n';
    return kExitOk;
}

int cmd_fit(const RunConfig& c, std::ostream& out) {
    const Stopwatch clock;
    if (!c.labels && !c.detections) throw ConfigError("fit requires --labels and/or --detections");
    const auto widths = c.bin_widths.empty() ? std::vector<double>{15.0, 5.0} : c.bin_widths;
    for (double w : widths) tightness::bin_count(w);
    if (c.conf_threshold && !(*c.conf_threshold >= 0.0 && *c.conf_threshold <= 1.0))
        throw ConfigError("--conf-threshold must lie in [0, 1]");
    const auto classes = load_classes(c);
    const ClassMap* cm = classes ? &*classes : nullptr;
    const MetaResolver meta(c);
    prepare_out_dir(c.out);

    std::vector<std::string> warnings;
    std::vector<tightness::TRSample> gt, pred;
    std::size_t skipped_degenerate = 0;
    json inputs;
    if (c.labels) {
        const auto labels = load_labels(c, meta, cm);
        warnings = labels.warnings;
        for (const auto& f : labels.frames) {
            for (const auto& g : f.gts) {
                if (g.quad.degenerate()) {
                    ++skipped_degenerate;
                    continue;
                }
                gt.push_back(tightness::make_sample(g.quad, tightness::Source::GroundTruth, g.class_id));
            }
        }
        inputs["labels"] = stats_json(labels.stats);
    }
    if (c.detections) {
        ingest::IngestStats det_stats;
        const auto dets = load_detections(c, cm, det_stats);
        for (const auto& i : det_stats.issues) warnings.push_back(i.message);
        std::size_t below = 0;
        for (const auto& d : dets) {
            if (c.conf_threshold && d.confidence < *c.conf_threshold) {
                ++below;
                continue;
            }
            pred.push_back(tightness::make_sample(d.quad, tightness::Source::Prediction, d.class_id));
        }
        inputs["detections"] = stats_json(det_stats);
        inputs["detections"]["below_conf_threshold"] = below;
    }
    if (skipped_degenerate > 0) {
        const auto msg = std::to_string(skipped_degenerate) + " degenerate label boxes left out of TR statistics";
        logger()->warn("{}", msg);
        warnings.push_back(msg);
    }

    if (gt.empty() && pred.empty()) throw DataError("no usable boxes for TR statistics");

    const auto ext = std::string(".") + report::extension(c.format);
    const auto header = c.echo();
    json res = json::array();
    for (double w : widths) {
        std::vector<report::TRBinRow> rows;
        auto add = [&](const std::vector<tightness::TRSample>& samples, tightness::Source src) {
            for (const auto& s : tightness::bin_by_orientation(samples, w))
                rows.push_back({tightness::to_string(src), w, s});
        };
        if (c.labels) add(gt, tightness::Source::GroundTruth);
        if (c.detections) add(pred, tightness::Source::Prediction);
        const auto tag = "w" + report::format_number(w);
        {
            auto f = open_output(c.out / ("tr_bins_" + tag + ext));
            report::write_tr_bins(f, rows, c.format, header);
        }
        json entry;
        entry["bin_width_deg"] = w;
        if (c.labels && c.detections) {
            const auto cmp = tightness::compare_gt_pred_tr(gt, pred, w);
            auto f = open_output(c.out / ("tr_gap_" + tag + ext));
            report::write_tr_gaps(f, cmp, c.format, header);
            entry["mean_abs_gap"] = cmp.mean_abs_gap ? json(*cmp.mean_abs_gap) : json(nullptr);
            out << "width " << report::format_number(w) << "\tmean |gap| "
                << (cmp.mean_abs_gap ? report::format_number(*cmp.mean_abs_gap) : std::string("n/a")) << '\n';
        }
        res.push_back(entry);
    }
    out << "samples\tgt " << gt.size() << "\tpred " << pred.size() << '\n';
    json result;
    result["gt_samples"] = gt.size();
    result["pred_samples"] = pred.size();
    result["widths"] = std::move(res);
    write_run_report(c, std::move(inputs), warnings, std::move(result), clock);
    return kExitOk;
}

int cmd_losscheck(const RunConfig& c, std::ostream& out) {
    c.loss.validate();
    const auto rep = loss::run_loss_check(c.loss);
    out << std::setprecision(10);
    for (const auto& f : rep.fixtures) {
        out << (f.pass ? "PASS " : "FAIL ") << f.name << " value=" << f.value << " expected=" << f.expected
            << " tol=" << f.tolerance << '\n';
    }
    out << (rep.gradient_pass() ? "PASS " : "FAIL ") << "vfl_gradient_grid points=" << rep.gradient.points
        << " max_rel_error=" << rep.gradient.max_rel_error << " worst=" << rep.gradient.worst_point
        << " tol=" << rep.gradient_tolerance << '\n';
    return rep.passed() ? kExitOk : kExitInternal;
}

int run(int argc, const char* const* argv, std::ostream& out) {
    CLI::App app{"Brand exposure analytics over oriented detections"};
    app.set_config("--config", "", "TOML or INI file with option values");
    app.require_subcommand(1);
    RunConfig c;
    std::string box_mode = "obb", interp = "all", format = "csv";
    std::optional<std::string> detections, labels, classes, meta;
    std::string out_dir = ".";

    auto common = [&](CLI::App* sub) {
        sub->add_option("--classes", classes, "class names, one per line (line number is the id)");
        sub->add_option("--meta", meta, "frame metadata JSON sidecar");
        sub->add_option("--width", c.width, "frame width in pixels")->check(CLI::PositiveNumber);
        sub->add_option("--height", c.height, "frame height in pixels")->check(CLI::PositiveNumber);
        sub->add_option("--format", format, "report format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_flag("--strict", c.strict, "fail on the first malformed record");
        sub->add_option("--jobs", c.jobs, "worker threads (0: all processors)");
        sub->add_option("--out", out_dir, "output directory");
    };

    auto* analyze = app.add_subcommand("analyze", "per-brand exposure metrics from a detection stream");
    analyze->add_option("--detections", detections, "JSON-lines detections ('-' for stdin)")->required();
    analyze->add_option("--fps", c.fps, "frame rate")->check(CLI::PositiveNumber);
    analyze->add_option("--frames", c.frames, "frames per video")->check(CLI::PositiveNumber);
    analyze->add_option("--conf-threshold", c.conf_threshold, "minimum detection confidence")
        ->check(CLI::Range(0.0, 1.0));
    analyze->add_option("--top-k", c.top_k, "brands in the ranking and timeline")->check(CLI::PositiveNumber);
    analyze->add_option("--min-run", c.min_run, "drop visible runs shorter than this")->check(CLI::PositiveNumber);
    analyze->add_option("--max-gap", c.max_gap, "bridge invisible gaps up to this length")
        ->check(CLI::NonNegativeNumber);
    common(analyze);

    auto* evaluate = app.add_subcommand("evaluate", "detector accuracy against labelled images");
    evaluate->add_option("--detections", detections, "JSON-lines predictions; video_id is the image stem")->required();
    evaluate->add_option("--labels", labels, "dataset root with <split>/images and <split>/labels")->required();
    evaluate->add_option("--split", c.split, "dataset split")->check(CLI::IsMember({"train", "val", "test"}));
    evaluate->add_option("--iou-threshold", c.iou_threshold, "match threshold")->check(CLI::Range(0.0, 1.0));
    evaluate->add_option("--conf-threshold", c.conf_threshold, "fixed operating point (default: max F1)")
        ->check(CLI::Range(0.0, 1.0));
    evaluate->add_option("--box-mode", box_mode, "IoU geometry")->check(CLI::IsMember({"obb", "hbb"}));
    evaluate->add_option("--ap-interp", interp, "AP interpolation")->check(CLI::IsMember({"all", "11"}));
    common(evaluate);

    auto* fit = app.add_subcommand("fit", "tightness ratio by orientation");
    fit->add_option("--labels", labels, "dataset root with <split>/images and <split>/labels");
    fit->add_option("--detections", detections, "JSON-lines predictions");
    fit->add_option("--split", c.split, "dataset split")->check(CLI::IsMember({"train", "val", "test"}));
    fit->add_option("--bin-width", c.bin_widths, "orientation bin width in degrees (repeatable)");
    fit->add_option("--conf-threshold", c.conf_threshold, "minimum prediction confidence")
        ->check(CLI::Range(0.0, 1.0));
    common(fit);

    auto* losscheck = app.add_subcommand("losscheck", "verify classification loss fixtures and gradients");
    losscheck->add_option("--gamma", c.loss.gamma, "focusing exponent");
    losscheck->add_option("--alpha", c.loss.alpha, "negative weight");
    losscheck->add_option("--lambda-box", c.loss.lambda_box);
    losscheck->add_option("--lambda-cls", c.loss.lambda_cls);
    losscheck->add_option("--lambda-dfl", c.loss.lambda_dfl);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        auto to_path = [](const std::optional<std::string>& s) {
            return s ? std::optional<fs::path>(*s) : std::nullopt;
        };
        c.detections = to_path(detections);
        c.labels = to_path(labels);
        c.classes = to_path(classes);
        c.meta = to_path(meta);
        c.out = out_dir;
        c.box_mode = eval::parse_box_mode(box_mode);
        c.interpolation = eval::parse_interpolation(interp);
        c.format = report::parse_format(format);
        logger();
        if (analyze->parsed()) {
            c.command = "analyze";
            return cmd_analyze(c, out);
        }
        if (evaluate->parsed()) {
            c.command = "evaluate";
            return cmd_evaluate(c, out);
        }
        if (fit->parsed()) {
            c.command = "fit";
            return cmd_fit(c, out);
        }
        c.command = "losscheck";
        return cmd_losscheck(c, out);
    } catch (const ContractError& e) {
        logger()->critical("{}", e.what());
        return kExitInternal;
    } catch (const ConfigError& e) {
        logger()->error("{}", e.what());
        return kExitConfig;
    } catch (const ParseError& e) {
        logger()->error("{}", e.what());
        return kExitData;
    } catch (const DataError& e) {
        logger()->error("{}", e.what());
        return kExitData;
    } catch (const GeometryError& e) {
        logger()->error("{}", e.what());
        return kExitData;
    } catch (const std::exception& e) {
        logger()->critical("internal error: {}", e.what());
        return kExitInternal;
    }
}

}  // namespace exposure::cli
