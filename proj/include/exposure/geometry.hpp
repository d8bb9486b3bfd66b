// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

// Exact 2-D polygon operations on oriented boxes.
//
// All shapes are stored as Eigen column-vertex matrices (2 x n). A QuadOBB is
// a four-corner box in canonical order: counter-clockwise (positive shoelace
// area in the coordinate values), starting at the vertex with the smallest y,
// ties broken by smallest x. Clipping uses repeated half-plane cuts, which is
// exact for convex operands and never produces more than n + 4 vertices when
// a convex n-gon is cut by four half-planes.

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "exposure/errors.hpp"

namespace exposure::geom {

/// On-edge classification tolerance, in pixels.
inline constexpr double kEdgeTolerance = 1e-9;

/// Storage bound for clip results. Quad inputs never exceed 8 vertices.
inline constexpr int kClipCapacity = 16;

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using QuadVertices = Eigen::Matrix<Scalar, 2, 4>;

template <typename Scalar>
using RectAA = Eigen::AlignedBox<Scalar, 2>;

template <typename Scalar>
using PolygonVertices = Eigen::Matrix<Scalar, 2, Eigen::Dynamic, Eigen::ColMajor, 2, kClipCapacity>;

template <typename Scalar>
inline Scalar cross2(const Point2<Scalar>& a, const Point2<Scalar>& b) {
    return a.x() * b.y() - a.y() * b.x();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    return m.allFinite();
}

/// Signed shoelace area of a closed vertex loop (2 x n). Positive for
/// counter-clockwise order. Accumulated relative to the first vertex.
template <typename Derived>
typename Derived::Scalar signed_area(const Eigen::MatrixBase<Derived>& v) {
    using Scalar = typename Derived::Scalar;
    static_assert(Derived::RowsAtCompileTime == 2, "vertex matrix must have two rows");
    if (!v.allFinite()) throw GeometryError("non-finite polygon coordinate");
    const Eigen::Index n = v.cols();
    if (n < 3) return Scalar(0);
    const Point2<Scalar> origin = v.col(0);
    Scalar twice = 0;
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        twice += cross2<Scalar>(v.col(i) - origin, v.col(i + 1) - origin);
    }
    return twice / Scalar(2);
}

/// Shoelace area, |sum| / 2. Fewer than three vertices gives 0.
template <typename Derived>
typename Derived::Scalar polygon_area(const Eigen::MatrixBase<Derived>& v) {
    return std::abs(signed_area(v));
}

/// Convex polygon produced by clipping; zero vertices means no overlap.
template <typename Scalar>
class ClipPolygon {
public:
    ClipPolygon() : vertices_(2, 0) {}

    template <typename Derived>
    explicit ClipPolygon(const Eigen::MatrixBase<Derived>& v) : vertices_(v) {}

    Eigen::Index size() const { return vertices_.cols(); }
    bool empty() const { return vertices_.cols() == 0; }
    const PolygonVertices<Scalar>& vertices() const { return vertices_; }
    Point2<Scalar> vertex(Eigen::Index i) const { return vertices_.col(i); }
    Scalar area() const { return polygon_area(vertices_); }

    void push_back(const Point2<Scalar>& p) {
        const Eigen::Index n = vertices_.cols();
        if (n == kClipCapacity) return;  // unreachable for convex input
        vertices_.conservativeResize(Eigen::NoChange, n + 1);
        vertices_.col(n) = p;
    }

    void clear() { vertices_.resize(2, 0); }

private:
    PolygonVertices<Scalar> vertices_;
};

template <typename Scalar>
class QuadOBB {
public:
    /// Canonicalizes winding and start vertex. Non-finite input throws;
    /// zero-area, reflex or self-intersecting input is kept but flagged.
    static QuadOBB normalize(const QuadVertices<Scalar>& raw);

    const QuadVertices<Scalar>& vertices() const { return vertices_; }
    Point2<Scalar> vertex(int i) const { return vertices_.col(i); }
    bool degenerate() const { return degenerate_; }
    Scalar area() const { return polygon_area(vertices_); }

    friend bool operator==(const QuadOBB& a, const QuadOBB& b) {
        return a.degenerate_ == b.degenerate_ && a.vertices_ == b.vertices_;
    }

private:
    QuadOBB(const QuadVertices<Scalar>& v, bool degenerate) : vertices_(v), degenerate_(degenerate) {}

    QuadVertices<Scalar> vertices_;
    bool degenerate_ = false;
};

template <typename Scalar>
QuadOBB<Scalar> QuadOBB<Scalar>::normalize(const QuadVertices<Scalar>& raw) {
    if (!raw.allFinite()) throw GeometryError("non-finite quad coordinate");
    const Scalar tol = static_cast<Scalar>(kEdgeTolerance);

    QuadVertices<Scalar> v = raw;
    const Scalar area2 = signed_area(v);
    if (area2 < 0) {
        v.col(1).swap(v.col(3));
    }

    int start = 0;
    for (int i = 1; i < 4; ++i) {
        if (v(1, i) < v(1, start) || (v(1, i) == v(1, start) && v(0, i) < v(0, start))) start = i;
    }
    QuadVertices<Scalar> canon;
    for (int i = 0; i < 4; ++i) canon.col(i) = v.col((start + i) % 4);

    Scalar perimeter = 0;
    bool reflex = false;
    for (int i = 0; i < 4; ++i) {
        const Point2<Scalar> e0 = canon.col((i + 1) % 4) - canon.col(i);
        const Point2<Scalar> e1 = canon.col((i + 2) % 4) - canon.col((i + 1) % 4);
        const Scalar len = e0.norm();
        perimeter += len;
        // Signed distance of the next vertex from the line carrying e0.
        if (len > 0 && cross2<Scalar>(e0, e1) / len < -tol) reflex = true;
    }
    const bool thin = std::abs(area2) <= tol * perimeter;
    return QuadOBB(canon, reflex || thin);
}

template <typename Scalar>
QuadOBB<Scalar> normalize_quad(const QuadVertices<Scalar>& raw) {
    return QuadOBB<Scalar>::normalize(raw);
}

/// Axis-aligned rectangle from explicit extents. Requires min <= max.
template <typename Scalar>
RectAA<Scalar> make_rect(Scalar x_min, Scalar y_min, Scalar x_max, Scalar y_max) {
    if (!(std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) && std::isfinite(y_max)))
        throw GeometryError("non-finite rectangle extent");
    if (x_min > x_max || y_min > y_max) throw GeometryError("rectangle extents are inverted");
    return RectAA<Scalar>(Point2<Scalar>(x_min, y_min), Point2<Scalar>(x_max, y_max));
}

template <typename Scalar>
QuadVertices<Scalar> rect_corners(const RectAA<Scalar>& r) {
    QuadVertices<Scalar> c;
    c << r.min().x(), r.max().x(), r.max().x(), r.min().x(),
         r.min().y(), r.min().y(), r.max().y(), r.max().y();
    return c;
}

/// Corners of a w x h rectangle centred at `center`, rotated by `theta_deg`
/// (counter-clockwise in coordinate values).
template <typename Scalar>
QuadVertices<Scalar> rotated_rect(const Point2<Scalar>& center, Scalar w, Scalar h, Scalar theta_deg) {
    const Eigen::Rotation2D<Scalar> rot(theta_deg * std::numbers::pi_v<Scalar> / Scalar(180));
    QuadVertices<Scalar> local;
    local << -w / 2, w / 2, w / 2, -w / 2,
             -h / 2, -h / 2, h / 2, h / 2;
    return (rot.toRotationMatrix() * local).colwise() + center;
}

namespace detail {

// Keeps the part of `poly` to the left of the directed line a -> b.
template <typename Scalar>
ClipPolygon<Scalar> clip_halfplane(const ClipPolygon<Scalar>& poly, const Point2<Scalar>& a,
                                   const Point2<Scalar>& b) {
    ClipPolygon<Scalar> out;
    const Eigen::Index n = poly.size();
    if (n == 0) return out;

    const Point2<Scalar> dir = b - a;
    const Scalar len = dir.norm();
    if (len == 0) return poly;
    const Scalar tol = static_cast<Scalar>(kEdgeTolerance);
    const Scalar tol2 = tol * tol;

    auto dist = [&](const Point2<Scalar>& p) { return cross2<Scalar>(dir, p - a) / len; };
    auto emit = [&](const Point2<Scalar>& p) {
        if (out.size() > 0 && (out.vertex(out.size() - 1) - p).squaredNorm() <= tol2) return;
        out.push_back(p);
    };
    auto crossing = [&](const Point2<Scalar>& s, Scalar ds, const Point2<Scalar>& e, Scalar de) {
        Scalar t = ds / (ds - de);
        t = std::clamp(t, Scalar(0), Scalar(1));
        Point2<Scalar> p = s + t * (e - s);
        // Axis-aligned cut lines land exactly on the line coordinate.
        if (dir.x() == 0) p.x() = a.x();
        if (dir.y() == 0) p.y() = a.y();
        return p;
    };

    Point2<Scalar> s = poly.vertex(n - 1);
    Scalar ds = dist(s);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Point2<Scalar> e = poly.vertex(i);
        const Scalar de = dist(e);
        const bool s_in = ds >= -tol;
        const bool e_in = de >= -tol;
        if (e_in) {
            if (!s_in) emit(crossing(s, ds, e, de));
            emit(e);
        } else if (s_in) {
            emit(crossing(s, ds, e, de));
        }
        s = e;
        ds = de;
    }
    if (out.size() > 1 && (out.vertex(0) - out.vertex(out.size() - 1)).squaredNorm() <= tol2) {
        PolygonVertices<Scalar> trimmed = out.vertices().leftCols(out.size() - 1);
        out = ClipPolygon<Scalar>(trimmed);
    }
    if (out.size() < 3) out.clear();
    return out;
}

template <typename Scalar>
void require_usable(const QuadOBB<Scalar>& q, const char* what) {
    if (q.degenerate()) throw GeometryError(std::string("degenerate quad passed to ") + what);
}

}  // namespace detail

/// poly intersected with the frame rectangle.
template <typename Scalar>
ClipPolygon<Scalar> clip_to_rect(const QuadOBB<Scalar>& poly, const RectAA<Scalar>& frame) {
    detail::require_usable(poly, "clip_to_rect");
    if (frame.isEmpty()) throw GeometryError("clip rectangle has inverted extents");
    ClipPolygon<Scalar> out(poly.vertices());
    const QuadVertices<Scalar> c = rect_corners(frame);
    for (int i = 0; i < 4 && !out.empty(); ++i) {
        out = detail::clip_halfplane<Scalar>(out, c.col(i), c.col((i + 1) % 4));
    }
    return out;
}

/// a intersected with b. Both operands must be convex (non-degenerate).
template <typename Scalar>
ClipPolygon<Scalar> convex_intersection(const QuadOBB<Scalar>& a, const QuadOBB<Scalar>& b) {
    detail::require_usable(a, "convex_intersection");
    detail::require_usable(b, "convex_intersection");
    ClipPolygon<Scalar> out(a.vertices());
    for (int i = 0; i < 4 && !out.empty(); ++i) {
        out = detail::clip_halfplane<Scalar>(out, b.vertex(i), b.vertex((i + 1) % 4));
    }
    return out;
}

/// Rotated intersection-over-union.
template <typename Scalar>
Scalar iou_obb(const QuadOBB<Scalar>& a, const QuadOBB<Scalar>& b) {
    const Scalar area_a = a.area();
    const Scalar area_b = b.area();
    if (area_a <= 0 && area_b <= 0) throw GeometryError("IoU undefined for two zero-area quads");
    const Scalar inter = convex_intersection(a, b).area();
    const Scalar uni = area_a + area_b - inter;
    if (uni <= 0) throw GeometryError("IoU undefined: empty union");
    return std::clamp(inter / uni, Scalar(0), Scalar(1));
}

template <typename Scalar>
Scalar rect_area(const RectAA<Scalar>& r) {
    return r.isEmpty() ? Scalar(0) : r.volume();
}

/// Axis-aligned IoU.
template <typename Scalar>
Scalar iou_rect(const RectAA<Scalar>& a, const RectAA<Scalar>& b) {
    const Scalar area_a = rect_area(a);
    const Scalar area_b = rect_area(b);
    if (area_a <= 0 && area_b <= 0) throw GeometryError("IoU undefined for two zero-area rectangles");
    const Scalar inter = rect_area(a.intersection(b));
    return std::clamp(inter / (area_a + area_b - inter), Scalar(0), Scalar(1));
}

/// Smallest axis-aligned rectangle containing every vertex.
template <typename Scalar>
RectAA<Scalar> enclosing_hbb(const QuadOBB<Scalar>& poly) {
    const auto& v = poly.vertices();
    return RectAA<Scalar>(v.rowwise().minCoeff(), v.rowwise().maxCoeff());
}

/// Angle between the longer edge pair and the horizontal axis, folded into
/// [0, 90] degrees. Square boxes use the first canonical edge.
template <typename Scalar>
Scalar obb_orientation_deg(const QuadOBB<Scalar>& poly) {
    detail::require_usable(poly, "obb_orientation_deg");
    const auto& v = poly.vertices();
    // Opposite edges run in opposite directions; their difference averages them.
    const Point2<Scalar> pair_a = (v.col(1) - v.col(0)) - (v.col(3) - v.col(2));
    const Point2<Scalar> pair_b = (v.col(2) - v.col(1)) - (v.col(0) - v.col(3));
    const Scalar len_a = pair_a.norm();
    const Scalar len_b = pair_b.norm();
    const Scalar rel = std::numeric_limits<Scalar>::epsilon() * Scalar(64) * std::max(len_a, len_b);
    const Point2<Scalar>& d = (len_b > len_a + rel) ? pair_b : pair_a;
    const Scalar deg = std::atan2(std::abs(d.y()), std::abs(d.x())) * Scalar(180) / std::numbers::pi_v<Scalar>;
    return std::clamp(deg, Scalar(0), Scalar(90));
}

}  // namespace exposure::geom
