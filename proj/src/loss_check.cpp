// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

#include "exposure/loss_check.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace exposure::loss {

bool LossCheckReport::passed() const {
    return gradient_pass() && std::all_of(fixtures.begin(), fixtures.end(), [](const FixtureResult& f) { return f.pass; });
}

GradientCheck gradient_check(const LossParams<double>& params, double h) {
    GradientCheck out;
    const double qs[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int pi = 1; pi <= 9; ++pi) {
        const double p = pi / 10.0;
        for (int y = 0; y <= 1; ++y) {
            for (double q_raw : qs) {
                const double q = y == 1 ? q_raw : 0.0;
                const double analytic = vfl_grad(p, y, q, params);
                const double numeric = (vfl(p + h, y, q, params) - vfl(p - h, y, q, params)) / (2 * h);
                const double scale = std::max(std::abs(analytic), std::abs(numeric));
                const double err = scale < 1e-6 ? std::abs(analytic - numeric) : std::abs(analytic - numeric) / scale;
                ++out.points;
                if (out.points == 1 || err > out.max_rel_error) {
                    out.max_rel_error = err;
                    std::ostringstream s;
                    s << "p=" << p << " y=" << y << " q=" << q;
                    out.worst_point = s.str();
                }
            }
        }
    }
    return out;
}

LossCheckReport run_loss_check(const LossParams<double>& params) {
    params.validate();
    LossCheckReport rep;
    auto check = [&](std::string name, double value, double expected, double tol) {
        rep.fixtures.push_back(FixtureResult{std::move(name), value, expected, tol, std::abs(value - expected) <= tol});
    };
    const double ln2 = std::log(2.0);
    const double one = 1.0;

    check("bce_soft_p0.5_q0.5", bce_soft(0.5, 0.5), ln2, 1e-4);
    check("bce_soft_q0_p0.5", bce_soft(0.5, 0.0), ln2, 1e-4);
    check("bce_soft_q1_p1", bce_soft(one, 1.0), 0.0, 1e-4);
    check("focal_gamma0_y1_p0.5", focal_loss(0.5, 1, 0.0), ln2, 1e-4);
    check("focal_gamma2_y1_p0.9", focal_loss(0.9, 1, 2.0), 0.001054, 1e-4);
    check("focal_y1_p1", focal_loss(one, 1, 2.0), 0.0, 1e-4);
    check("vfl_positive_q1_p1", vfl(one, 1, 1.0, params), 0.0, 1e-4);
    check("vfl_negative_p0.5", vfl(0.5, 0, 0.0, params), 0.1300, 1e-4);
    check("vfl_positive_q0.8_p0.8", vfl(0.8, 1, 0.8, params), 0.4003, 1e-4);

    AnchorTargets<double> single;
    single.p = AnchorTargets<double>::Array::Constant(1, 1, 0.5);
    single.y = AnchorTargets<double>::Array::Zero(1, 1);
    single.q = AnchorTargets<double>::Array::Zero(1, 1);
    check("cls_loss_single_negative", cls_loss(single, params), 0.1300, 1e-4);

    LossParams<double> unit;
    check("total_loss_unit_weights", total_loss(1.0, 2.0, 3.0, unit), 6.0, 1e-12);
    check("vfl_grad_y1_q1_p0.5", vfl_grad(0.5, 1, 1.0, params), -2.0, 1e-9);

    // Exact reductions over a probability grid.
    double focal_gap = 0.0;
    double vfl_gap = 0.0;
    for (int i = 1; i <= 99; ++i) {
        const double p = i / 100.0;
        for (int y = 0; y <= 1; ++y) focal_gap = std::max(focal_gap, std::abs(focal_loss(p, y, 0.0) - bce_soft(p, double(y))));
        vfl_gap = std::max(vfl_gap, std::abs(vfl(p, 1, 1.0, params) + std::log(p)));
    }
    check("reduction_focal_gamma0_is_bce", focal_gap, 0.0, 1e-12);
    check("reduction_vfl_y1_q1_is_neglogp", vfl_gap, 0.0, 1e-12);

    rep.gradient = gradient_check(params);
    return rep;
}

}  // namespace exposure::loss
