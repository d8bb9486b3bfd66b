// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace exposure {

/// Non-finite coordinates, or an operation that is undefined for the given shape.
class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Bad run configuration: frame rate, frame count, bin width, thresholds.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Loss-function precondition broken by the caller (e.g. q != 0 on a negative).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input data that cannot support the requested computation (no ground truth,
/// empty sample set, frames outside the declared range).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ParseErrorKind {
    FieldCount,
    NonNumeric,
    NonFinite,
    CoordinateRange,
    BadClassId,
    UnknownClass,
    MissingField,
    BadFieldType,
    VertexCount,
    ConfidenceRange,
    FrameRange,
    DegenerateQuad,
    Malformed,
};

const char* to_string(ParseErrorKind kind);

/// Input record that could not be accepted. `line` is 1-based; 0 when unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorKind kind, std::size_t line, const std::string& detail)
        : std::runtime_error(format(kind, line, detail)), kind_(kind), line_(line), detail_(detail) {}

    ParseErrorKind kind() const noexcept { return kind_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    static std::string format(ParseErrorKind kind, std::size_t line, const std::string& detail) {
        std::string out = "line " + std::to_string(line) + ": " + to_string(kind);
        if (!detail.empty()) out += ": " + detail;
        return out;
    }

    ParseErrorKind kind_;
    std::size_t line_;
    std::string detail_;
};

inline const char* to_string(ParseErrorKind kind) {
    switch (kind) {
        case ParseErrorKind::FieldCount: return "field count";
        case ParseErrorKind::NonNumeric: return "non-numeric token";
        case ParseErrorKind::NonFinite: return "non-finite value";
        case ParseErrorKind::CoordinateRange: return "coordinate out of range";
        case ParseErrorKind::BadClassId: return "invalid class id";
        case ParseErrorKind::UnknownClass: return "unknown class";
        case ParseErrorKind::MissingField: return "missing field";
        case ParseErrorKind::BadFieldType: return "wrong field type";
        case ParseErrorKind::VertexCount: return "expected 4 vertices";
        case ParseErrorKind::ConfidenceRange: return "confidence out of range";
        case ParseErrorKind::FrameRange: return "frame index out of range";
        case ParseErrorKind::DegenerateQuad: return "degenerate quad";
        case ParseErrorKind::Malformed: return "malformed record";
    }
    return "unknown";
}

}  // namespace exposure
