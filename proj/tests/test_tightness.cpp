// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "exposure/tightness.hpp"
#include "test_support.hpp"

namespace exposure {
namespace {

using tightness::Source;
using tightness::TRSample;

double tr_of(double w, double h, double deg) {
    return tightness::tightness_ratio(Quad::normalize(geom::rotated_rect(Point(37, -12), w, h, deg)));
}

TEST(TightnessRatio, Fixtures) {
    EXPECT_EQ(tightness::tightness_ratio(testing::box(3, 4, 10, 6)), 1.0);
    EXPECT_NEAR(tr_of(1, 1, 45), 0.5, 1e-12);
    EXPECT_NEAR(tr_of(2, 1, 45), 4.0 / 9.0, 1e-12);
}

TEST(TightnessRatio, ClosedFormFixtures) {
    EXPECT_EQ(tightness::tr_rect_closed_form(3.0, 7.0, 0.0), 1.0);
    EXPECT_EQ(tightness::tr_rect_closed_form(5.0, 5.0, 45.0), 0.5);
    EXPECT_NEAR(tightness::tr_rect_closed_form(2.0, 1.0, 45.0), 4.0 / 9.0, 1e-15);
}

TEST(TightnessRatio, ClosedFormAgreement) {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> len(0.5, 500), ang(0, 90);
    for (int k = 0; k < 10000; ++k) {
        const double w = len(rng), h = len(rng), t = ang(rng);
        const double expect = tightness::tr_rect_closed_form(w, h, t);
        EXPECT_NEAR(tr_of(w, h, t), expect, 1e-9 * expect);
        const double own = tightness::tightness_ratio(testing::rotated(0, 0, w, h, t));
        EXPECT_NEAR(own, expect, 1e-9 * expect);
    }
}

TEST(TightnessRatio, MinimumAtFortyFive) {
    for (auto [w, h] : {std::pair{1.0, 1.0}, {2.0, 1.0}, {10.0, 1.0}, {1.0, 3.5}, {100.0, 99.0}}) {
        int best = 0;
        for (int i = 0; i <= 900; ++i) {
            if (tightness::tr_rect_closed_form(w, h, i / 10.0) < tightness::tr_rect_closed_form(w, h, best / 10.0))
                best = i;
        }
        EXPECT_EQ(best, 450) << w << "x" << h;
    }
}

TEST(TightnessRatio, ScaleInvariance) {
    std::mt19937_64 rng(67);
    std::uniform_real_distribution<double> scale(0.01, 100);
    for (int k = 0; k < 1000; ++k) {
        const Quad q = testing::random_convex_quad(rng, 0, 100);
        const double s = scale(rng);
        const Quad scaled = Quad::normalize(q.vertices() * s);
        EXPECT_NEAR(tightness::tightness_ratio(scaled), tightness::tightness_ratio(q),
                    1e-12 * tightness::tightness_ratio(q));
    }
}

TEST(TightnessRatio, BoundsAndAxisAlignment) {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> len(1, 100), ang(1e-3, 90 - 1e-3);
    for (int k = 0; k < 2000; ++k) {
        const double w = len(rng), h = len(rng);
        const double tr = tr_of(w, h, ang(rng));
        EXPECT_GT(tr, 0.0);
        EXPECT_LT(tr, 1.0);
        EXPECT_NEAR(tr_of(w, h, 0), 1.0, 1e-12);
        EXPECT_NEAR(tr_of(w, h, 90), 1.0, 1e-12);
    }
    std::mt19937_64 rng2(72);
    for (int k = 0; k < 500; ++k) {
        const double tr = tightness::tightness_ratio(testing::random_convex_quad(rng2, 0, 100));
        EXPECT_GT(tr, 0.0);
        EXPECT_LE(tr, 1.0);
    }
}

TEST(TightnessRatio, DegenerateThrows) {
    const Quad flat = testing::quad_from({{0, 0}, {1, 0}, {2, 0}, {3, 0}});
    EXPECT_THROW(tightness::tightness_ratio(flat), GeometryError);
    EXPECT_THROW(tightness::make_sample(flat, Source::GroundTruth, 0), GeometryError);
}

TEST(Sample, OrientationAndRatio) {
    const auto s = tightness::make_sample(Quad::normalize(geom::rotated_rect(Point(0, 0), 4.0, 1.0, 30.0)),
                                          Source::Prediction, 9);
    EXPECT_NEAR(s.orientation_deg, 30.0, 1e-9);
    EXPECT_NEAR(s.tr, tightness::tr_rect_closed_form(4.0, 1.0, 30.0), 1e-12);
    EXPECT_EQ(s.class_id, 9);
}

TEST(Binning, AllAxisAligned) {
    const std::vector<TRSample> s(5, TRSample{Source::GroundTruth, 1.0, 0.0, 0});
    const auto bins = tightness::bin_by_orientation(s, 15);
    ASSERT_EQ(bins.size(), 6u);
    EXPECT_EQ(bins[0].n, 5u);
    EXPECT_EQ(bins[0].mean_tr, 1.0);
    EXPECT_EQ(*bins[0].ci95_half_width, 0.0);
    for (std::size_t b = 1; b < 6; ++b) {
        EXPECT_EQ(bins[b].n, 0u);
        EXPECT_FALSE(bins[b].ci95_half_width);
    }
    EXPECT_EQ(bins[5].lo, 75.0);
    EXPECT_EQ(bins[5].hi, 90.0);
}

TEST(Binning, TwoSampleInterval) {
    const std::vector<TRSample> s = {{Source::GroundTruth, 0.4, 20, 0}, {Source::GroundTruth, 0.6, 25, 0}};
    const auto bins = tightness::bin_by_orientation(s, 15);
    EXPECT_NEAR(bins[1].mean_tr, 0.5, 1e-15);
    EXPECT_NEAR(*bins[1].ci95_half_width, 1.96 * std::sqrt(0.02) / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(*bins[1].ci95_half_width, 0.196, 1e-6);
}

TEST(Binning, SingleSampleHasNoInterval) {
    const std::vector<TRSample> s = {{Source::GroundTruth, 0.7, 50, 0}};
    const auto bins = tightness::bin_by_orientation(s, 5);
    ASSERT_EQ(bins.size(), 18u);
    EXPECT_EQ(bins[10].n, 1u);
    EXPECT_FALSE(bins[10].ci95_half_width);
}

TEST(Binning, EdgesAndNinety) {
    const std::vector<TRSample> s = {{Source::GroundTruth, 1, 15, 0}, {Source::GroundTruth, 1, 90, 0}};
    const auto bins = tightness::bin_by_orientation(s, 15);
    EXPECT_EQ(bins[1].n, 1u);
    EXPECT_EQ(bins[5].n, 1u);
}

TEST(Binning, InvalidWidths) {
    for (double w : {7.0, 0.0, -5.0, 91.0, 40.0}) EXPECT_THROW(tightness::bin_by_orientation({}, w), ConfigError);
    EXPECT_EQ(tightness::bin_count(90), 1u);
    EXPECT_EQ(tightness::bin_count(2.5), 36u);
}

TEST(Comparison, IdenticalShiftedAndDisjoint) {
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> ang(0, 90), tr(0.3, 0.9);
    std::vector<TRSample> gt, shifted;
    for (int k = 0; k < 300; ++k) {
        gt.push_back({Source::GroundTruth, tr(rng), ang(rng), 0});
        shifted.push_back({Source::Prediction, gt.back().tr + 0.05, gt.back().orientation_deg, 0});
    }
    const auto same = tightness::compare_gt_pred_tr(gt, gt, 15);
    EXPECT_EQ(*same.mean_abs_gap, 0.0);
    for (const auto& row : same.rows) EXPECT_EQ(*row.abs_gap, 0.0);

    const auto shift = tightness::compare_gt_pred_tr(gt, shifted, 5);
    for (const auto& row : shift.rows) {
        if (row.abs_gap) {
            EXPECT_NEAR(*row.abs_gap, 0.05, 1e-12);
        }
    }
    EXPECT_NEAR(*shift.mean_abs_gap, 0.05, 1e-12);

    const std::vector<TRSample> low = {{Source::GroundTruth, 0.9, 5, 0}};
    const std::vector<TRSample> high = {{Source::Prediction, 0.6, 80, 0}};
    const auto disjoint = tightness::compare_gt_pred_tr(low, high, 15);
    for (const auto& row : disjoint.rows) EXPECT_FALSE(row.abs_gap);
    EXPECT_FALSE(disjoint.mean_abs_gap);
    EXPECT_EQ(*disjoint.rows[0].gt_mean, 0.9);
    EXPECT_EQ(*disjoint.rows[5].pred_mean, 0.6);
}

}  // namespace
}  // namespace exposure
