// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "exposure/cli.hpp"

int main(int argc, char** argv) { return exposure::cli::run(argc, argv, std::cout); }
