// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "exposure/detector_eval.hpp"
#include "exposure/loss.hpp"
#include "exposure/report.hpp"

namespace exposure::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,    ///< validation or configuration error
    kExitData = 2,      ///< data error in strict mode, or unusable data
    kExitInternal = 3,  ///< internal assertion, including failed loss fixtures
};

struct RunConfig {
    std::string command;
    std::optional<std::filesystem::path> detections;
    std::optional<std::filesystem::path> labels;
    std::optional<std::filesystem::path> classes;
    std::optional<std::filesystem::path> meta;
    std::string split = "test";
    std::optional<double> width;
    std::optional<double> height;
    std::optional<double> fps;
    std::optional<std::int64_t> frames;
    std::optional<double> conf_threshold;
    double iou_threshold = 0.5;
    std::vector<double> bin_widths;  ///< empty: 15 and 5 degrees
    std::size_t top_k = 10;
    int min_run = 1;
    int max_gap = 0;
    eval::BoxMode box_mode = eval::BoxMode::Obb;
    eval::Interpolation interpolation = eval::Interpolation::AllPoints;
    report::Format format = report::Format::Csv;
    bool strict = false;
    unsigned jobs = 0;
    std::filesystem::path out = ".";
    loss::LossParams<double> loss;

    /// Everything that affects results; excludes the worker count.
    report::Header echo() const;
};

int cmd_analyze(const RunConfig& config, std::ostream& out);
int cmd_evaluate(const RunConfig& config, std::ostream& out);
int cmd_fit(const RunConfig& config, std::ostream& out);
int cmd_losscheck(const RunConfig& config, std::ostream& out);

/// Parses argv, dispatches, and maps exceptions onto ExitCode.
int run(int argc, const char* const* argv, std::ostream& out);

}  // namespace exposure::cli
