// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "exposure/report.hpp"
#include "test_support.hpp"

namespace exposure::report {
namespace {

TEST(Csv, Quoting) {
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
    const std::vector<std::string> row = {"x", "", "y,z"};
    EXPECT_EQ(csv_row(row), "x,,\"y,z\"\n");
}

TEST(Csv, ParseRoundTrip) {
    const std::vector<std::vector<std::string>> table = {
        {"id", "name", "note"}, {"1", "Acme, Inc.", "quote \" inside"}, {"2", "", "multi\r\nline"}, {"3", "x", ""}};
    std::string text;
    for (const auto& r : table) text += csv_row(r);
    EXPECT_EQ(parse_csv(text), table);
    EXPECT_EQ(parse_csv("a,b\r\nc,d\r\n"), (std::vector<std::vector<std::string>>{{"a", "b"}, {"c", "d"}}));
    EXPECT_THROW(parse_csv("a,\"open\n"), ParseError);
}

TEST(Numbers, ShortestRoundTrip) {
    std::mt19937_64 rng(89);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int k = 0; k < 10000; ++k) {
        const double v = u(rng);
        EXPECT_EQ(parse_number(format_number(v)), v);
    }
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(3.0), "3");
    EXPECT_THROW(format_number(std::nan("")), std::invalid_argument);
    EXPECT_THROW(parse_number("1.5x"), ParseError);
}

TEST(Format, Names) {
    EXPECT_EQ(parse_format("csv"), Format::Csv);
    EXPECT_EQ(parse_format("json"), Format::Json);
    EXPECT_THROW(parse_format("xml"), ConfigError);
    EXPECT_STREQ(extension(Format::Json), "json");
}

std::vector<BrandRow> sample_brands() {
    std::vector<BrandRow> rows;
    std::mt19937_64 rng(97);
    std::uniform_real_distribution<double> u(0, 100);
    for (int b = 0; b < 25; ++b) {
        BrandRow r;
        r.video_id = b % 2 ? "match,day \"2\"" : "v1";
        r.brand = b % 3 ? "Brand " + std::to_string(b) : "";
        r.metrics.brand_id = b;
        r.metrics.exposure_s = u(rng);
        r.metrics.avg_cov_present_pct = u(rng);
        r.metrics.avg_cov_overall_pct = u(rng) / 7;
        r.metrics.max_cov_pct = u(rng);
        r.metrics.detection_count = b * 13;
        r.metrics.appearances = b * 11;
        rows.push_back(r);
    }
    return rows;
}

TEST(BrandMetrics, RoundTripBothFormats) {
    const auto rows = sample_brands();
    for (Format f : {Format::Csv, Format::Json}) {
        std::stringstream ss;
        write_brand_metrics(ss, rows, f, Header{{"fps", 25.0}});
        EXPECT_EQ(read_brand_metrics(ss, f), rows);
    }
}

TEST(BrandMetrics, EmptyIsHeaderOnly) {
    std::stringstream csv;
    write_brand_metrics(csv, {}, Format::Csv);
    EXPECT_EQ(csv.str(),
              "video_id,brand_id,brand,exposure_s,avg_cov_present_pct,avg_cov_overall_pct,max_cov_pct,"
              "detection_count,appearances\n");
    EXPECT_TRUE(read_brand_metrics(csv, Format::Csv).empty());

    std::stringstream json;
    write_brand_metrics(json, {}, Format::Json);
    const auto j = nlohmann::json::parse(json.str());
    EXPECT_TRUE(j.at("brands").empty());
    EXPECT_FALSE(j.contains("config"));
}

TEST(BrandMetrics, RejectsWrongHeader) {
    std::stringstream ss("video,brand\n");
    EXPECT_THROW(read_brand_metrics(ss, Format::Csv), ParseError);
}

TEST(Ranking, Csv) {
    const std::vector<RankingRow> rows = {{"v", 1, 4, "Acme", 12.5}, {"v", 2, 0, "", 3.0}};
    std::stringstream ss;
    write_ranking(ss, rows, Format::Csv);
    EXPECT_EQ(ss.str(), "video_id,rank,brand_id,brand,exposure_s\nv,1,4,Acme,12.5\nv,2,0,,3\n");
}

TEST(Timeline, Csv) {
    const std::vector<TimelineRow> rows = {{"v", 2, "B", 1, 0.0, 0.25, false}, {"v", 2, "B", 3, 0.08, 0.0, true}};
    std::stringstream ss;
    write_timeline_csv(ss, rows);
    EXPECT_EQ(ss.str(),
              "video_id,brand_id,brand,frame_index,time_s,coverage,bridged\nv,2,B,1,0,0.25,0\nv,2,B,3,0.08,0,1\n");
}

eval::EvalResult sample_eval() {
    eval::EvalResult r;
    r.iou_threshold = 0.5;
    r.box_mode = eval::BoxMode::Hbb;
    r.interpolation = eval::Interpolation::ElevenPoint;
    r.per_class_ap = {{0, 5.0 / 6.0}, {2, 0.25}};
    r.classes = {{0, 3, 4, 2, 5.0 / 6.0}, {1, 0, 2, 0, std::nullopt}, {2, 4, 1, 1, 0.25}};
    r.map50 = (5.0 / 6.0 + 0.25) / 2;
    r.precision = 2.0 / 3.0;
    r.recall = 0.4;
    r.f1 = 0.5;
    r.operating_confidence = 0.7;
    r.iou_histogram = {{0.5, 0.55, 0.95}, {0.6, 0.4, 0.0}, 5};
    r.n_frames = 9;
    r.n_gt = 7;
    r.n_pred = 7;
    r.dropped_preds = 1;
    return r;
}

TEST(EvalJson, Schema) {
    const ClassMap classes({"alpha"});
    std::stringstream ss;
    write_eval_result(ss, sample_eval(), Format::Json, &classes);
    const auto j = nlohmann::json::parse(ss.str());
    for (const char* key : {"iou_threshold", "box_mode", "interpolation", "map50", "precision", "recall", "f1",
                            "operating_confidence", "per_class_ap", "classes", "iou_histogram", "counts"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["box_mode"], "hbb");
    EXPECT_EQ(j["per_class_ap"].size(), 2u);
    EXPECT_EQ(j["classes"][0]["class_name"], "alpha");
    EXPECT_TRUE(j["classes"][1]["ap"].is_null());
    EXPECT_EQ(j["iou_histogram"]["0.55"], 0.4);
}

TEST(EvalJson, RoundTrip) {
    const auto r = sample_eval();
    std::stringstream ss;
    write_eval_result(ss, r, Format::Json);
    const auto back = read_eval_result_json(ss);
    EXPECT_EQ(back.map50, r.map50);
    EXPECT_EQ(back.precision, r.precision);
    EXPECT_EQ(back.recall, r.recall);
    EXPECT_EQ(back.f1, r.f1);
    EXPECT_EQ(back.operating_confidence, r.operating_confidence);
    EXPECT_EQ(back.per_class_ap, r.per_class_ap);
    EXPECT_EQ(back.box_mode, r.box_mode);
    EXPECT_EQ(back.interpolation, r.interpolation);
    ASSERT_EQ(back.classes.size(), 3u);
    EXPECT_FALSE(back.classes[1].ap);
    EXPECT_EQ(back.classes[2].n_gt, 4u);
    EXPECT_EQ(back.iou_histogram.thresholds, r.iou_histogram.thresholds);
    EXPECT_EQ(back.iou_histogram.fractions, r.iou_histogram.fractions);
    EXPECT_EQ(back.n_frames, 9u);
    EXPECT_EQ(back.dropped_preds, 1u);
}

TEST(EvalCsv, Tables) {
    const auto r = sample_eval();
    std::stringstream table, summary, hist;
    write_eval_result(table, r, Format::Csv);
    write_eval_summary_csv(summary, r);
    write_iou_histogram_csv(hist, r.iou_histogram);
    const auto t = parse_csv(table.str());
    ASSERT_EQ(t.size(), 4u);
    EXPECT_EQ(t[2][5], "");
    const auto s = parse_csv(summary.str());
    EXPECT_EQ(s[4], (std::vector<std::string>{"map50", format_number(r.map50)}));
    const auto h = parse_csv(hist.str());
    EXPECT_EQ(h[2], (std::vector<std::string>{"0.55", "0.4", "5"}));
}

TEST(TRBins, RoundTripBothFormats) {
    std::vector<tightness::TRSample> samples;
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> ang(0, 60), tr(0.4, 1);
    for (int k = 0; k < 50; ++k) samples.push_back({tightness::Source::GroundTruth, tr(rng), ang(rng), 0});
    samples.push_back({tightness::Source::GroundTruth, 0.5, 88, 0});
    std::vector<TRBinRow> rows;
    for (const auto& b : tightness::bin_by_orientation(samples, 15)) rows.push_back({"ground_truth", 15, b});
    for (Format f : {Format::Csv, Format::Json}) {
        std::stringstream ss;
        write_tr_bins(ss, rows, f);
        const auto back = read_tr_bins(ss, f);
        ASSERT_EQ(back.size(), rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            EXPECT_EQ(back[i].source, rows[i].source);
            EXPECT_EQ(back[i].stat.lo, rows[i].stat.lo);
            EXPECT_EQ(back[i].stat.n, rows[i].stat.n);
            if (rows[i].stat.n) {
                EXPECT_EQ(back[i].stat.mean_tr, rows[i].stat.mean_tr);
            }
            EXPECT_EQ(back[i].stat.ci95_half_width, rows[i].stat.ci95_half_width);
        }
    }
}

TEST(TRGaps, EmptyBinsAreBlank) {
    const std::vector<tightness::TRSample> gt = {{tightness::Source::GroundTruth, 0.9, 5, 0}};
    const std::vector<tightness::TRSample> pred = {{tightness::Source::Prediction, 0.8, 6, 0}};
    const auto cmp = tightness::compare_gt_pred_tr(gt, pred, 45);
    std::stringstream csv, json;
    write_tr_gaps(csv, cmp, Format::Csv);
    write_tr_gaps(json, cmp, Format::Json);
    const auto t = parse_csv(csv.str());
    ASSERT_EQ(t.size(), 3u);
    EXPECT_EQ(t[2], (std::vector<std::string>{"45", "90", "0", "0", "", "", ""}));
    const auto j = nlohmann::json::parse(json.str());
    EXPECT_NEAR(j["mean_abs_gap"].get<double>(), 0.1, 1e-12);
    EXPECT_TRUE(j["bins"][1]["abs_gap"].is_null());
}

}  // namespace
}  // namespace exposure::report
