// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

#include "exposure/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

namespace exposure {

void FrameMeta::validate(bool timed) const {
    if (!(std::isfinite(width) && width > 0 && std::isfinite(height) && height > 0))
        throw ConfigError("frame width and height must be positive");
    if (timed) {
        if (!(std::isfinite(frame_rate) && frame_rate > 0)) throw ConfigError("frame rate must be positive");
        if (frame_count < 0) throw ConfigError("frame count must be >= 0");
    }
}

ClassMap::ClassMap(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i].empty()) throw ConfigError("empty class name for id " + std::to_string(i));
        if (!index_.emplace(names_[i], static_cast<int>(i)).second)
            throw ConfigError("duplicate class name '" + names_[i] + "'");
    }
}

ClassMap ClassMap::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open class map " + path.string());
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        names.push_back(line);
    }
    while (!names.empty() && names.back().empty()) names.pop_back();
    return ClassMap(std::move(names));
}

std::optional<int> ClassMap::id(std::string_view name) const {
    const auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

}  // namespace exposure

namespace exposure::ingest {

using nlohmann::json;

void IngestStats::record(const ParseError& e) {
    ++skipped;
    if (issues.size() < kMaxIssues) issues.push_back(Issue{e.line(), e.kind(), e.what()});
}

void IngestStats::merge(const IngestStats& other) {
    total += other.total;
    accepted += other.accepted;
    skipped += other.skipped;
    degenerate += other.degenerate;
    for (const auto& issue : other.issues) {
        if (issues.size() >= kMaxIssues) break;
        issues.push_back(issue);
    }
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) ++i;
        const std::size_t start = i;
        while (i < line.size() && !is_space(line[i])) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

bool blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(), is_space);
}

void check_class(int id, std::size_t line_no, const ClassMap* classes) {
    if (id < 0) throw ParseError(ParseErrorKind::BadClassId, line_no, std::to_string(id));
    if (classes && !classes->contains(id))
        throw ParseError(ParseErrorKind::UnknownClass, line_no, "class id " + std::to_string(id));
}

std::string format_g(double v, int digits) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, digits);
    return std::string(buf.data(), res.ptr);
}

}  // namespace

GroundTruth parse_obb_label_line(std::string_view line, const FrameMeta& img, std::size_t line_no,
                                 const ClassMap* classes, std::string frame_id) {
    const auto tokens = split_ws(line);
    if (tokens.size() != 9)
        throw ParseError(ParseErrorKind::FieldCount, line_no, "expected 9 fields, got " + std::to_string(tokens.size()));

    int class_id = 0;
    {
        const auto tok = tokens[0];
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), class_id);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
            throw ParseError(ParseErrorKind::BadClassId, line_no, std::string(tok));
        check_class(class_id, line_no, classes);
    }

    geom::QuadVertices<double> raw;
    for (int k = 0; k < 8; ++k) {
        const auto tok = tokens[static_cast<std::size_t>(k) + 1];
        double v = 0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec == std::errc::result_out_of_range)
            throw ParseError(ParseErrorKind::CoordinateRange, line_no, std::string(tok));
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
            throw ParseError(ParseErrorKind::NonNumeric, line_no, std::string(tok));
        if (!std::isfinite(v)) throw ParseError(ParseErrorKind::NonFinite, line_no, std::string(tok));
        if (v < -kLabelRangeTolerance || v > 1.0 + kLabelRangeTolerance)
            throw ParseError(ParseErrorKind::CoordinateRange, line_no, std::string(tok));
        raw(k % 2, k / 2) = v * (k % 2 == 0 ? img.width : img.height);
    }
    return GroundTruth{std::move(frame_id), class_id, Quad::normalize(raw)};
}

std::string format_obb_label_line(const GroundTruth& gt, const FrameMeta& img) {
    std::string out = std::to_string(gt.class_id);
    const auto& v = gt.quad.vertices();
    for (int i = 0; i < 4; ++i) {
        out += ' ';
        out += format_g(v(0, i) / img.width, kLabelDigits);
        out += ' ';
        out += format_g(v(1, i) / img.height, kLabelDigits);
    }
    return out;
}

LabelFile read_label_file(const std::filesystem::path& path, std::string frame_id, const FrameMeta& img,
                          const ClassMap* classes, bool strict) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open label file " + path.string());
    LabelFile out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        ++out.stats.total;
        try {
            auto gt = parse_obb_label_line(line, img, line_no, classes, frame_id);
            if (gt.quad.degenerate()) {
                ++out.stats.degenerate;
                if (out.stats.issues.size() < IngestStats::kMaxIssues)
                    out.stats.issues.push_back(Issue{line_no, ParseErrorKind::DegenerateQuad,
                                                     path.filename().string() + ": degenerate quad kept for audit"});
            }
            out.labels.push_back(std::move(gt));
            ++out.stats.accepted;
        } catch (const ParseError& e) {
            if (strict) throw;
            out.stats.record(e);
        }
    }
    return out;
}

Detection parse_detection_record(std::string_view line, std::size_t line_no, const ClassMap* classes) {
    const json rec = json::parse(line.begin(), line.end(), nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) throw ParseError(ParseErrorKind::Malformed, line_no, "not a JSON object");

    auto field = [&](const char* name) -> const json& {
        const auto it = rec.find(name);
        if (it == rec.end()) throw ParseError(ParseErrorKind::MissingField, line_no, name);
        return *it;
    };

    const json& video = field("video_id");
    if (!video.is_string()) throw ParseError(ParseErrorKind::BadFieldType, line_no, "video_id must be a string");

    const json& frame = field("frame");
    if (!frame.is_number_integer()) throw ParseError(ParseErrorKind::BadFieldType, line_no, "frame must be an integer");
    const auto frame_index = frame.get<std::int64_t>();
    if (frame_index < 1) throw ParseError(ParseErrorKind::FrameRange, line_no, "frame " + std::to_string(frame_index));

    const json& cls = field("class");
    int class_id = 0;
    if (cls.is_number_integer()) {
        const auto raw_id = cls.get<std::int64_t>();
        if (raw_id < 0 || raw_id > std::numeric_limits<int>::max())
            throw ParseError(ParseErrorKind::BadClassId, line_no, std::to_string(raw_id));
        class_id = static_cast<int>(raw_id);
        check_class(class_id, line_no, classes);
    } else if (cls.is_string()) {
        const auto& name = cls.get_ref<const std::string&>();
        if (!classes) throw ParseError(ParseErrorKind::UnknownClass, line_no, "class name '" + name + "' needs a class map");
        const auto id = classes->id(name);
        if (!id) throw ParseError(ParseErrorKind::UnknownClass, line_no, "'" + name + "'");
        class_id = *id;
    } else {
        throw ParseError(ParseErrorKind::BadFieldType, line_no, "class must be an integer id or a name");
    }

    const json& poly = field("poly");
    if (!poly.is_array()) throw ParseError(ParseErrorKind::BadFieldType, line_no, "poly must be an array");
    if (poly.size() != 4)
        throw ParseError(ParseErrorKind::VertexCount, line_no, "got " + std::to_string(poly.size()));
    geom::QuadVertices<double> raw;
    for (std::size_t i = 0; i < 4; ++i) {
        const json& p = poly[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw ParseError(ParseErrorKind::BadFieldType, line_no, "poly vertices must be [x, y] number pairs");
        raw(0, static_cast<Eigen::Index>(i)) = p[0].get<double>();
        raw(1, static_cast<Eigen::Index>(i)) = p[1].get<double>();
    }
    if (!raw.allFinite()) throw ParseError(ParseErrorKind::NonFinite, line_no, "poly");

    const json& conf = field("conf");
    if (!conf.is_number()) throw ParseError(ParseErrorKind::BadFieldType, line_no, "conf must be a number");
    const double confidence = conf.get<double>();
    if (!(confidence >= 0.0 && confidence <= 1.0))
        throw ParseError(ParseErrorKind::ConfidenceRange, line_no, format_g(confidence, 17));

    return Detection{video.get<std::string>(), frame_index, class_id, Quad::normalize(raw), confidence};
}

std::string format_detection_record(const Detection& det) {
    nlohmann::ordered_json rec;
    rec["video_id"] = det.video_id;
    rec["frame"] = det.frame_index;
    rec["class"] = det.class_id;
    auto poly = nlohmann::ordered_json::array();
    const auto& v = det.quad.vertices();
    for (int i = 0; i < 4; ++i) poly.push_back({v(0, i), v(1, i)});
    rec["poly"] = std::move(poly);
    rec["conf"] = det.confidence;
    return rec.dump();
}

DetectionReader::DetectionReader(std::istream& in, DetectionReaderOptions options)
    : in_(in), options_(std::move(options)) {}

std::optional<Detection> DetectionReader::next() {
    while (std::getline(in_, line_)) {
        ++line_no_;
        if (blank(line_)) continue;
        ++stats_.total;
        try {
            Detection det = parse_detection_record(line_, line_no_, options_.classes);
            if (det.quad.degenerate()) throw ParseError(ParseErrorKind::DegenerateQuad, line_no_, det.video_id);
            if (options_.frame_count) {
                const auto n = options_.frame_count(det.video_id);
                if (n && det.frame_index > *n)
                    throw ParseError(ParseErrorKind::FrameRange, line_no_,
                                     "frame " + std::to_string(det.frame_index) + " > " + std::to_string(*n));
            }
            ++stats_.accepted;
            return det;
        } catch (const ParseError& e) {
            if (options_.strict) throw;
            stats_.record(e);
        }
    }
    return std::nullopt;
}

std::vector<Detection> parse_detections_stream(std::istream& in, const DetectionReaderOptions& options,
                                               IngestStats* stats) {
    DetectionReader reader(in, options);
    std::vector<Detection> out;
    while (auto det = reader.next()) out.push_back(std::move(*det));
    if (stats) *stats = reader.stats();
    return out;
}

Split parse_split(std::string_view name) {
    if (name == "train") return Split::Train;
    if (name == "val") return Split::Val;
    if (name == "test") return Split::Test;
    throw ConfigError("unknown split '" + std::string(name) + "' (expected train, val or test)");
}

const char* to_string(Split split) {
    switch (split) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "test";
}

namespace {

bool is_image_ext(std::string ext) {
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    static const std::set<std::string> kImageExts = {".jpg", ".jpeg", ".png", ".bmp", ".webp", ".tif", ".tiff"};
    return kImageExts.count(ext) > 0;
}

std::vector<std::filesystem::path> regular_files(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    if (!std::filesystem::is_directory(dir)) return out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file()) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

SplitListing load_split(const std::filesystem::path& root, Split split, bool strict) {
    const auto dir = root / to_string(split);
    if (!std::filesystem::is_directory(dir)) throw ConfigError("split directory not found: " + dir.string());

    std::map<std::string, SplitItem> items;
    for (const auto& p : regular_files(dir / "images")) {
        if (!is_image_ext(p.extension().string())) continue;
        const std::string stem = p.stem().string();
        auto& item = items[stem];
        if (item.image) throw ConfigError("duplicate image stem '" + stem + "' in " + (dir / "images").string());
        item.stem = stem;
        item.image = p;
    }
    for (const auto& p : regular_files(dir / "labels")) {
        if (p.extension() != ".txt") continue;
        const std::string stem = p.stem().string();
        auto& item = items[stem];
        item.stem = stem;
        item.label = p;
    }

    SplitListing out;
    for (auto& [stem, item] : items) {
        if (!item.label) {
            out.warnings.push_back("image without label file (background frame): " + stem);
        } else if (!item.image) {
            out.warnings.push_back(std::string("label without image") + (strict ? " (excluded): " : ": ") + stem);
            if (strict) continue;
        }
        out.items.push_back(std::move(item));
    }
    return out;
}

std::optional<FrameMeta> MetaTable::lookup(const std::string& video_id) const {
    const auto it = per_video.find(video_id);
    if (it != per_video.end()) return it->second;
    return fallback;
}

namespace {

FrameMeta meta_from_json(const json& j) {
    FrameMeta m;
    auto num = [&](const char* key, double dflt) {
        const auto it = j.find(key);
        if (it == j.end()) return dflt;
        if (!it->is_number()) throw ConfigError(std::string("meta field '") + key + "' must be a number");
        return it->get<double>();
    };
    m.width = num("width", 0.0);
    m.height = num("height", 0.0);
    m.frame_rate = num("fps", 0.0);
    const double frames = num("frames", 0.0);
    if (frames < 0 || frames != std::floor(frames)) throw ConfigError("meta field 'frames' must be a non-negative integer");
    m.frame_count = static_cast<std::int64_t>(frames);
    return m;
}

}  // namespace

MetaTable MetaTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open meta file " + path.string());
    const json root = json::parse(in, nullptr, false);
    if (root.is_discarded() || !root.is_object()) throw ConfigError("meta file is not a JSON object: " + path.string());

    MetaTable table;
    if (root.contains("width") || root.contains("height")) table.fallback = meta_from_json(root);
    if (const auto it = root.find("videos"); it != root.end()) {
        if (!it->is_array()) throw ConfigError("meta 'videos' must be an array");
        for (const auto& v : *it) {
            if (!v.is_object() || !v.contains("video_id") || !v["video_id"].is_string())
                throw ConfigError("each meta video entry needs a string video_id");
            table.per_video[v["video_id"].get<std::string>()] = meta_from_json(v);
        }
    }
    if (!table.fallback && table.per_video.empty()) throw ConfigError("meta file defines no frame geometry");
    return table;
}

}  // namespace exposure::ingest
