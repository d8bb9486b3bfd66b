// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "exposure/loss.hpp"

namespace exposure::loss {

struct FixtureResult {
    std::string name;
    double value = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct GradientCheck {
    double max_rel_error = 0.0;
    std::string worst_point;
    std::size_t points = 0;
};

struct LossCheckReport {
    std::vector<FixtureResult> fixtures;
    GradientCheck gradient;
    double gradient_tolerance = 1e-6;

    bool gradient_pass() const { return gradient.max_rel_error < gradient_tolerance; }
    bool passed() const;
};

/// Analytic vfl_grad against central differences (step h) over
/// p in {0.1..0.9}, y in {0, 1}, q in {0, 0.25, 0.5, 0.75, 1} (q = 0 for y = 0).
/// Relative error, falling back to absolute error where both gradients are
/// below 1e-6 in magnitude.
GradientCheck gradient_check(const LossParams<double>& params, double h = 1e-6);

/// Substitution fixtures, reductions and the gradient grid. Expected values
/// are those of the default parameters (gamma 2, alpha 0.75).
LossCheckReport run_loss_check(const LossParams<double>& params = {});

}  // namespace exposure::loss
