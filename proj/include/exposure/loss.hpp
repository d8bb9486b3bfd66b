// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

// Classification losses for dense detectors: soft-target BCE, focal loss and
// varifocal loss (VFL), the anchor-averaged classification term and the
// weighted total objective. Natural logarithms throughout. Probabilities are
// clamped to [eps, 1 - eps] before any logarithm is taken.

#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <optional>

#include "exposure/errors.hpp"

namespace exposure::loss {

inline constexpr double kProbEpsilon = 1e-7;

template <typename Scalar = double>
struct LossParams {
    Scalar gamma = Scalar(2.0);
    Scalar alpha = Scalar(0.75);
    Scalar lambda_box = Scalar(1.0);
    Scalar lambda_cls = Scalar(1.0);
    Scalar lambda_dfl = Scalar(1.0);

    void validate() const {
        if (!(gamma >= 0)) throw ConfigError("gamma must be >= 0");
        if (!(alpha >= 0 && alpha <= 1)) throw ConfigError("alpha must lie in [0, 1]");
        if (!(lambda_box >= 0 && lambda_cls >= 0 && lambda_dfl >= 0))
            throw ConfigError("loss weights must be >= 0");
    }
};

/// Dense per-anchor, per-class targets; all three arrays are |A| x C.
template <typename Scalar = double>
struct AnchorTargets {
    using Array = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Array p;  ///< predicted probability (sigmoid output)
    Array y;  ///< binary label
    Array q;  ///< quality target; zero wherever y is zero
};

template <typename Scalar>
Scalar clamp_prob(Scalar p) {
    const Scalar eps = static_cast<Scalar>(kProbEpsilon);
    return std::clamp(p, eps, Scalar(1) - eps);
}

namespace detail {

inline void check_label(int y) {
    if (y != 0 && y != 1) throw ContractError("label must be 0 or 1");
}

template <typename Scalar>
void check_quality(int y, Scalar q) {
    if (!(q >= 0 && q <= 1)) throw ContractError("quality target must lie in [0, 1]");
    if (y == 0 && q != 0) throw ContractError("quality target must be 0 for negatives");
}

// Neumaier compensated sum; order-stable to well below 1e-12 relative.
template <typename Scalar>
class CompensatedSum {
public:
    void add(Scalar x) {
        const Scalar t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    Scalar value() const { return sum_ + comp_; }

private:
    Scalar sum_ = 0;
    Scalar comp_ = 0;
};

}  // namespace detail

/// BCE(p, q) = -q log p - (1 - q) log(1 - p).
template <typename Scalar>
Scalar bce_soft(Scalar p, Scalar q) {
    if (!(q >= 0 && q <= 1)) throw ContractError("soft target must lie in [0, 1]");
    const Scalar pc = clamp_prob(p);
    return -q * std::log(pc) - (Scalar(1) - q) * std::log1p(-pc);
}

/// -alpha (1 - p_t)^gamma log p_t. There is no class-balance term here, so
/// alpha is a plain weight defaulting to 1.
template <typename Scalar>
Scalar focal_loss(Scalar p, int y, Scalar gamma, Scalar alpha = Scalar(1)) {
    detail::check_label(y);
    if (!(gamma >= 0)) throw ConfigError("focal gamma must be >= 0");
    const Scalar pc = clamp_prob(p);
    const Scalar pt = y == 1 ? pc : Scalar(1) - pc;
    const Scalar log_pt = y == 1 ? std::log(pc) : std::log1p(-pc);
    return -alpha * std::pow(Scalar(1) - pt, gamma) * log_pt;
}

/// Varifocal weight: alpha * p^gamma on negatives, q on positives.
template <typename Scalar>
Scalar vfl_weight(Scalar p, int y, Scalar q, Scalar gamma, Scalar alpha) {
    detail::check_label(y);
    detail::check_quality(y, q);
    return y == 1 ? q : alpha * std::pow(clamp_prob(p), gamma);
}

template <typename Scalar>
Scalar vfl(Scalar p, int y, Scalar q, Scalar gamma = Scalar(2.0), Scalar alpha = Scalar(0.75)) {
    return vfl_weight(p, y, q, gamma, alpha) * bce_soft(p, q);
}

template <typename Scalar>
Scalar vfl(Scalar p, int y, Scalar q, const LossParams<Scalar>& params) {
    return vfl(p, y, q, params.gamma, params.alpha);
}

/// d vfl / dp, including the derivative of the p^gamma weight on negatives.
/// Zero where p is clamped.
template <typename Scalar>
Scalar vfl_grad(Scalar p, int y, Scalar q, const LossParams<Scalar>& params) {
    detail::check_label(y);
    detail::check_quality(y, q);
    if (clamp_prob(p) != p) return Scalar(0);
    if (y == 1) {
        return q * (-q / p + (Scalar(1) - q) / (Scalar(1) - p));
    }
    const Scalar neg_log = -std::log1p(-p);
    const Scalar weight_term =
        params.gamma == 0 ? Scalar(0) : params.gamma * std::pow(p, params.gamma - Scalar(1)) * neg_log;
    return params.alpha * (weight_term + std::pow(p, params.gamma) / (Scalar(1) - p));
}

/// Element-wise VFL over equally shaped arrays.
template <typename DP, typename DY, typename DQ>
Eigen::Array<typename DP::Scalar, DP::RowsAtCompileTime, DP::ColsAtCompileTime>
vfl(const Eigen::ArrayBase<DP>& p, const Eigen::ArrayBase<DY>& y, const Eigen::ArrayBase<DQ>& q,
    const LossParams<typename DP::Scalar>& params) {
    using Scalar = typename DP::Scalar;
    if (p.rows() != y.rows() || p.cols() != y.cols() || p.rows() != q.rows() || p.cols() != q.cols())
        throw ContractError("p, y and q must have identical shapes");
    Eigen::Array<Scalar, DP::RowsAtCompileTime, DP::ColsAtCompileTime> out(p.rows(), p.cols());
    for (Eigen::Index j = 0; j < p.cols(); ++j)
        for (Eigen::Index i = 0; i < p.rows(); ++i)
            out(i, j) = vfl<Scalar>(p(i, j), static_cast<int>(y(i, j)), q(i, j), params);
    return out;
}

/// L_cls = (1/|A|) sum_a sum_c VFL(p_ac, y_ac, q_ac).
template <typename Scalar>
Scalar cls_loss(const AnchorTargets<Scalar>& t, const LossParams<Scalar>& params) {
    if (t.p.rows() == 0) throw ContractError("classification loss needs at least one anchor");
    const auto per_elem = vfl(t.p, t.y, t.q, params);
    detail::CompensatedSum<Scalar> sum;
    for (Eigen::Index a = 0; a < per_elem.rows(); ++a)
        for (Eigen::Index c = 0; c < per_elem.cols(); ++c) sum.add(per_elem(a, c));
    return sum.value() / static_cast<Scalar>(per_elem.rows());
}

/// lambda_box * L_box + lambda_cls * L_cls + lambda_dfl * L_dfl.
template <typename Scalar>
Scalar total_loss(Scalar l_box, Scalar l_cls, Scalar l_dfl, const LossParams<Scalar>& params) {
    if (!(l_box >= 0 && l_cls >= 0 && l_dfl >= 0)) throw ContractError("loss components must be >= 0");
    return params.lambda_box * l_box + params.lambda_cls * l_cls + params.lambda_dfl * l_dfl;
}

}  // namespace exposure::loss
