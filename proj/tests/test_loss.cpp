// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "exposure/loss.hpp"
#include "exposure/loss_check.hpp"

namespace exposure::loss {
namespace {

const double kLn2 = 0.6931471805599453;

TEST(BceSoft, Fixtures) {
    EXPECT_NEAR(bce_soft(0.5, 0.5), kLn2, 1e-4);
    EXPECT_NEAR(bce_soft(0.5, 0.5), kLn2, 1e-15);
    EXPECT_NEAR(bce_soft(1.0, 1.0), 0.0, 1e-4);
    EXPECT_NEAR(bce_soft(0.5, 0.0), kLn2, 1e-15);
}

TEST(BceSoft, MinimizedAtTarget) {
    for (double q : {0.1, 0.3, 0.5, 0.8}) {
        const double at = bce_soft(q, q);
        for (double d : {-0.05, -0.01, 0.01, 0.05}) EXPECT_GT(bce_soft(q + d, q), at);
    }
}

TEST(FocalLoss, Fixtures) {
    EXPECT_NEAR(focal_loss(0.5, 1, 0.0), kLn2, 1e-15);
    EXPECT_NEAR(focal_loss(0.9, 1, 2.0), 0.001054, 1e-4);
    EXPECT_NEAR(focal_loss(0.9, 1, 2.0), 0.001053605156578263, 1e-15);
    EXPECT_NEAR(focal_loss(1.0, 1, 2.0), 0.0, 1e-4);
    EXPECT_NEAR(focal_loss(0.9, 1, 2.0, 0.25), 0.25 * 0.001053605156578263, 1e-15);
}

TEST(FocalLoss, GammaZeroIsBce) {
    for (int i = 1; i <= 999; ++i) {
        const double p = i / 1000.0;
        EXPECT_NEAR(focal_loss(p, 1, 0.0), bce_soft(p, 1.0), 1e-12);
        EXPECT_NEAR(focal_loss(p, 0, 0.0), bce_soft(p, 0.0), 1e-12);
    }
}

TEST(Vfl, Fixtures) {
    EXPECT_NEAR(vfl(1.0, 1, 1.0), 0.0, 1e-4);
    EXPECT_NEAR(vfl(0.5, 0, 0.0), 0.1300, 1e-4);
    EXPECT_NEAR(vfl(0.5, 0, 0.0), 0.12996509635498973, 1e-15);
    EXPECT_NEAR(vfl(0.8, 1, 0.8), 0.4003, 1e-4);
    EXPECT_NEAR(vfl(0.8, 1, 0.8), 0.40032193883055034, 1e-15);
}

TEST(Vfl, PositiveUnitQualityIsNegLog) {
    for (double gamma : {0.0, 1.0, 2.0, 3.5}) {
        for (int i = 1; i <= 99; ++i) {
            const double p = i / 100.0;
            EXPECT_NEAR(vfl(p, 1, 1.0, gamma, 0.75), -std::log(p), 1e-12);
        }
    }
}

TEST(Vfl, QualityAlignment) {
    for (int i = 1; i <= 19; ++i) {
        for (int j = 0; j <= 10; ++j) {
            const double p = i / 20.0, q = j / 10.0;
            EXPECT_NEAR(vfl(p, 1, q), q * bce_soft(p, q), 1e-15);
        }
    }
}

TEST(Vfl, NegativeSuppression) {
    double prev = 0.0;
    for (int i = 1; i <= 999; ++i) {
        const double v = vfl(i / 1000.0, 0, 0.0);
        EXPECT_GT(v, prev);
        prev = v;
    }
    double ratio_prev = 1.0;
    for (double p : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
        const double ratio = vfl(p, 0, 0.0) / bce_soft(p, 0.0);
        EXPECT_LT(ratio, ratio_prev);
        ratio_prev = ratio;
    }
    EXPECT_LT(ratio_prev, 1e-9);
}

TEST(Vfl, NonNegative) {
    std::mt19937_64 rng(79);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 10000; ++k) {
        const int y = static_cast<int>(rng() % 2);
        const double q = y ? u(rng) : 0.0;
        EXPECT_GE(vfl(u(rng), y, q), 0.0);
        EXPECT_GE(focal_loss(u(rng), y, 3 * u(rng)), 0.0);
        EXPECT_GE(bce_soft(u(rng), u(rng)), 0.0);
    }
}

TEST(Vfl, ContractErrors) {
    EXPECT_THROW(vfl(0.5, 0, 0.3), ContractError);
    EXPECT_THROW(vfl(0.5, 2, 0.0), ContractError);
    EXPECT_THROW(vfl(0.5, 1, 1.5), ContractError);
    EXPECT_THROW(vfl_grad(0.5, 0, 0.3, LossParams<double>{}), ContractError);
    EXPECT_THROW(bce_soft(0.5, -0.1), ContractError);
}

TEST(Vfl, ArrayMatchesScalar) {
    Eigen::ArrayXXd p(2, 3), y(2, 3), q(2, 3);
    p << 0.1, 0.5, 0.9, 0.3, 0.7, 0.2;
    y << 0, 1, 1, 0, 1, 0;
    q << 0, 0.6, 1, 0, 0.2, 0;
    const auto out = vfl(p, y, q, LossParams<double>{});
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_EQ(out(i, j), vfl(p(i, j), static_cast<int>(y(i, j)), q(i, j)));
    Eigen::ArrayXXd bad(1, 3);
    EXPECT_THROW(vfl(p, bad, q, LossParams<double>{}), ContractError);
}

TEST(VflGrad, Fixtures) {
    EXPECT_NEAR(vfl_grad(0.5, 1, 1.0, LossParams<double>{}), -2.0, 1e-12);
    double prev = 1.0;
    for (double p : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const double g = vfl_grad(p, 0, 0.0, LossParams<double>{});
        EXPECT_GT(g, 0.0);
        EXPECT_LT(g, prev);
        prev = g;
    }
    EXPECT_LT(prev, 1e-6);
    EXPECT_EQ(vfl_grad(0.0, 0, 0.0, LossParams<double>{}), 0.0);
}

TEST(VflGrad, CentralDifferenceGrid) {
    for (double gamma : {0.0, 1.0, 2.0, 2.5}) {
        for (double alpha : {0.25, 0.75, 1.0}) {
            LossParams<double> params;
            params.gamma = gamma;
            params.alpha = alpha;
            const auto check = gradient_check(params);
            EXPECT_EQ(check.points, 90u);
            EXPECT_LT(check.max_rel_error, 1e-6) << "gamma " << gamma << " alpha " << alpha << " at "
                                                 << check.worst_point;
        }
    }
}

AnchorTargets<double> targets(std::initializer_list<std::array<double, 3>> rows) {
    AnchorTargets<double> t;
    const auto n = static_cast<Eigen::Index>(rows.size());
    t.p.resize(n, 1);
    t.y.resize(n, 1);
    t.q.resize(n, 1);
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        t.p(i, 0) = r[0];
        t.y(i, 0) = r[1];
        t.q(i, 0) = r[2];
        ++i;
    }
    return t;
}

TEST(ClsLoss, Fixtures) {
    const LossParams<double> params;
    EXPECT_NEAR(cls_loss(targets({{0.5, 0, 0}}), params), 0.1300, 1e-4);
    EXPECT_EQ(cls_loss(targets({{0.3, 1, 0.7}, {0.3, 1, 0.7}}), params), cls_loss(targets({{0.3, 1, 0.7}}), params));
    EXPECT_THROW(cls_loss(AnchorTargets<double>{}, params), ContractError);
}

TEST(ClsLoss, ParameterReductionToMeanBce) {
    LossParams<double> params;
    params.gamma = 0;
    params.alpha = 1;
    const auto t = targets({{0.2, 0, 0}, {0.6, 1, 1}, {0.9, 0, 0}, {0.35, 1, 1}});
    double mean_bce = 0;
    for (Eigen::Index i = 0; i < 4; ++i) mean_bce += bce_soft(t.p(i, 0), t.q(i, 0)) / 4;
    EXPECT_NEAR(cls_loss(t, params), mean_bce, 1e-15);
}

TEST(ClsLoss, SumsClassesAndAveragesAnchors) {
    AnchorTargets<double> t;
    t.p.resize(2, 2);
    t.y.resize(2, 2);
    t.q.resize(2, 2);
    t.p << 0.5, 0.2, 0.7, 0.9;
    t.y << 0, 1, 1, 0;
    t.q << 0, 0.4, 0.9, 0;
    const double expect =
        (vfl(0.5, 0, 0.0) + vfl(0.2, 1, 0.4) + vfl(0.7, 1, 0.9) + vfl(0.9, 0, 0.0)) / 2;
    EXPECT_NEAR(cls_loss(t, LossParams<double>{}), expect, 1e-15);
}

TEST(ClsLoss, OrderIndependent) {
    std::mt19937_64 rng(83);
    std::uniform_real_distribution<double> u(0, 1);
    const Eigen::Index n = 20000;
    AnchorTargets<double> t;
    t.p.resize(n, 3);
    t.y.resize(n, 3);
    t.q.resize(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index c = 0; c < 3; ++c) {
            t.p(i, c) = u(rng);
            t.y(i, c) = rng() % 5 == 0;
            t.q(i, c) = t.y(i, c) ? u(rng) : 0.0;
        }
    }
    const double ref = cls_loss(t, LossParams<double>{});
    AnchorTargets<double> r = t;
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (Eigen::Index i = 0; i < n; ++i) {
        r.p.row(i) = t.p.row(perm[static_cast<std::size_t>(i)]);
        r.y.row(i) = t.y.row(perm[static_cast<std::size_t>(i)]);
        r.q.row(i) = t.q.row(perm[static_cast<std::size_t>(i)]);
    }
    EXPECT_NEAR(cls_loss(r, LossParams<double>{}), ref, 1e-12 * ref);
}

TEST(TotalLoss, WeightedSum) {
    LossParams<double> params;
    EXPECT_EQ(total_loss(1.0, 2.0, 3.0, params), 6.0);
    EXPECT_EQ(total_loss(0.0, 0.0, 0.0, params), 0.0);
    params.lambda_cls = 0;
    EXPECT_EQ(total_loss(1.0, 50.0, 3.0, params), total_loss(1.0, 2.0, 3.0, params));
    params.lambda_box = 7.5;
    EXPECT_EQ(total_loss(2.0, 0.0, 1.0, params), 16.0);
    EXPECT_THROW(total_loss(-1.0, 0.0, 0.0, params), ContractError);
}

TEST(Params, Validate) {
    LossParams<double> p;
    EXPECT_NO_THROW(p.validate());
    p.alpha = 1.5;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.gamma = -1;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.lambda_dfl = -0.1;
    EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Clamp, Boundaries) {
    EXPECT_TRUE(std::isfinite(bce_soft(0.0, 1.0)));
    EXPECT_NEAR(bce_soft(0.0, 1.0), -std::log(kProbEpsilon), 1e-9);
    EXPECT_TRUE(std::isfinite(vfl(1.0, 0, 0.0)));
}

TEST(Float, Instantiation) {
    EXPECT_NEAR(bce_soft(0.5f, 0.5f), static_cast<float>(kLn2), 1e-6f);
    EXPECT_NEAR(vfl(0.5f, 0, 0.0f), 0.13f, 1e-4f);
    LossParams<float> params;
    EXPECT_NEAR(vfl_grad(0.5f, 1, 1.0f, params), -2.0f, 1e-5f);
}

TEST(LossCheck, DefaultsPass) {
    const auto rep = run_loss_check();
    for (const auto& f : rep.fixtures) EXPECT_TRUE(f.pass) << f.name << " " << f.value;
    EXPECT_TRUE(rep.gradient_pass());
    EXPECT_TRUE(rep.passed());
}

TEST(LossCheck, WrongAlphaFailsNamedFixture) {
    LossParams<double> params;
    params.alpha = 0.5;
    const auto rep = run_loss_check(params);
    EXPECT_FALSE(rep.passed());
    bool named = false;
    for (const auto& f : rep.fixtures) named |= !f.pass && f.name == "vfl_negative_p0.5";
    EXPECT_TRUE(named);
}

}  // namespace
}  // namespace exposure::loss
