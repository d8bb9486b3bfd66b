// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "exposure/geometry.hpp"

namespace exposure {

using Quad = geom::QuadOBB<double>;
using Point = geom::Point2<double>;
using Rect = geom::RectAA<double>;

/// Frame geometry and timing of one video (or one still image).
struct FrameMeta {
    double width = 0.0;
    double height = 0.0;
    double frame_rate = 0.0;
    std::int64_t frame_count = 0;

    double frame_area() const { return width * height; }
    double frame_period() const { return 1.0 / frame_rate; }
    Rect frame_rect() const { return geom::make_rect(0.0, 0.0, width, height); }

    /// W, H > 0 always; r > 0 and N >= 0 when `timed`.
    void validate(bool timed = true) const;
};

/// Bijective id <-> name table; ids are dense from 0.
class ClassMap {
public:
    ClassMap() = default;
    explicit ClassMap(std::vector<std::string> names);

    /// One class name per line; the 0-based line number is the id.
    static ClassMap load(const std::filesystem::path& path);

    std::size_t size() const { return names_.size(); }
    bool contains(int id) const { return id >= 0 && static_cast<std::size_t>(id) < names_.size(); }
    const std::string& name(int id) const { return names_.at(static_cast<std::size_t>(id)); }
    std::optional<int> id(std::string_view name) const;
    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
};

struct GroundTruth {
    std::string frame_id;
    int class_id = 0;
    Quad quad;
};

struct Detection {
    std::string video_id;
    std::int64_t frame_index = 1;
    int class_id = 0;
    Quad quad;
    double confidence = 0.0;
};

}  // namespace exposure
