#include "conjlab/geom2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace conjlab::geom2d {

namespace {

void require_finite(const std::vector<Point2>& pts) {
    for (const Point2& p : pts) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            fail_validation("NonFiniteCoordinate", "vertex coordinates must be finite");
        }
    }
}

double bbox_diag(const std::vector<Point2>& pts) {
    double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
    for (const Point2& p : pts) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    return std::hypot(xmax - xmin, ymax - ymin);
}

double signed_area(const std::vector<Point2>& pts) {
    double a = 0.0;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        a += cross(pts[i], pts[(i + 1) % n]);
    }
    return 0.5 * a;
}

}  // namespace

ConvexPolygon2D ConvexPolygon2D::validate(std::vector<Point2> points) {
    if (points.size() < 3) {
        fail_validation("TooFewVertices", "a polygon needs at least 3 vertices");
    }
    require_finite(points);
    const double diag = bbox_diag(points);
    if (diag <= 0.0) {
        fail_validation("DuplicateVertex", "all vertices coincide");
    }

    const double dup_tol = 1e-12 * diag;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (distance(points[i], points[j]) <= dup_tol) {
                fail_validation("DuplicateVertex",
                                "vertices " + std::to_string(i) + " and " + std::to_string(j) +
                                    " coincide within tolerance");
            }
        }
    }

    if (signed_area(points) < 0.0) {
        std::reverse(points.begin(), points.end());
    }

    const double cross_tol = kConvexityRelTol * diag * diag;
    const std::size_t n = points.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 e1 = points[(i + 1) % n] - points[i];
        const Point2 e2 = points[(i + 2) % n] - points[(i + 1) % n];
        if (cross(e1, e2) <= cross_tol) {
            fail_validation("NotConvex",
                            "reflex or collinear vertex at index " + std::to_string((i + 1) % n));
        }
    }
    return ConvexPolygon2D(std::move(points), diag);
}

Point2 ConvexPolygon2D::centroid() const {
    Point2 c;
    for (const Point2& p : verts_) c = c + p;
    return (1.0 / static_cast<double>(verts_.size())) * c;
}

double PedalSet::sum() const {
    double s = 0.0;
    for (const PedalEntry& e : entries) s += e.distance;
    return s;
}

bool contains_interior(const ConvexPolygon2D& poly, Point2 m) {
    if (!std::isfinite(m.x) || !std::isfinite(m.y)) return false;
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 e = v[(i + 1) % n] - v[i];
        const double len = norm(e);
        // Signed perpendicular distance to the side line; positive inside.
        const double d = cross(e, m - v[i]) / len;
        if (d <= kInteriorTol) return false;
    }
    return true;
}

namespace {

void require_interior(const ConvexPolygon2D& poly, Point2 m) {
    if (!contains_interior(poly, m)) {
        fail_validation("ProbeNotInterior", "probe point is not strictly inside the polygon");
    }
}

}  // namespace

std::vector<double> vertex_distances(const ConvexPolygon2D& poly, Point2 m) {
    require_interior(poly, m);
    std::vector<double> out;
    out.reserve(poly.vertices().size());
    for (const Point2& a : poly.vertices()) out.push_back(distance(m, a));
    return out;
}

PedalSet perpendicular_pedal(const ConvexPolygon2D& poly, Point2 m) {
    require_interior(poly, m);
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    PedalSet set;
    set.angle_deg = 90.0;
    set.entries.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = v[i];
        const Point2 b = v[(i + 1) % n];
        const Point2 e = b - a;
        const double len = norm(e);
        const Point2 u = (1.0 / len) * e;
        const double along = dot(m - a, u);
        const Point2 foot = a + along * u;
        const double h = cross(u, m - a);  // > 0 for interior m
        PedalEntry entry;
        entry.side_index = static_cast<int>(i);
        entry.foot = foot;
        entry.distance = h;
        entry.segment_t = along / len;
        entry.inside_segment = entry.segment_t >= 0.0 && entry.segment_t <= 1.0;
        set.entries.push_back(entry);
    }
    return set;
}

PedalSet oblique_pedal(const ConvexPolygon2D& poly, Point2 m, double angle_deg) {
    if (!(angle_deg > 0.0 && angle_deg < 180.0)) {
        fail_validation("DegenerateAngle", "pedal angle must lie strictly between 0 and 180 degrees");
    }
    PedalSet set = perpendicular_pedal(poly, m);
    set.angle_deg = angle_deg;
    const double rad = angle_deg * std::numbers::pi / 180.0;
    const double s = std::sin(rad);
    const double cot = std::cos(rad) / s;
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        PedalEntry& entry = set.entries[i];
        const Point2 a = v[i];
        const Point2 b = v[(i + 1) % n];
        const Point2 e = b - a;
        const double len = norm(e);
        const Point2 u = (1.0 / len) * e;
        // Slide the foot back along the side so the angle from the side
        // direction to foot->m equals angle_deg (counterclockwise).
        const double shift = entry.distance * cot;
        entry.foot = entry.foot - shift * u;
        entry.distance = entry.distance / s;
        entry.segment_t = dot(entry.foot - a, u) / len;
        entry.inside_segment = entry.segment_t >= 0.0 && entry.segment_t <= 1.0;
    }
    return set;
}

RatioReport em_ratio(const ConvexPolygon2D& poly, Point2 m, double angle_deg) {
    const PedalSet pedals =
        angle_deg == 90.0 ? perpendicular_pedal(poly, m) : oblique_pedal(poly, m, angle_deg);
    const std::vector<double> vd = vertex_distances(poly, m);
    RatioReport r;
    r.angle_deg = angle_deg;
    r.probe = m;
    for (double d : vd) r.sum_vertex += d;
    r.sum_pedal = pedals.sum();
    r.ratio = r.sum_vertex / r.sum_pedal;
    return r;
}

ConvexPolygon2D regular_polygon(int n) {
    if (n < 3) fail_validation("TooFewVertices", "a polygon needs at least 3 vertices");
    std::vector<Point2> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        pts.push_back({std::cos(t), std::sin(t)});
    }
    return ConvexPolygon2D::validate(std::move(pts));
}

double conjectured_floor(int n, double angle_deg) {
    const double rad = angle_deg * std::numbers::pi / 180.0;
    return std::sin(rad) / std::cos(std::numbers::pi / static_cast<double>(n));
}

ConvexPolygon2D polygon_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("vertices") || !j["vertices"].is_array()) {
        fail_validation("BadPolygonFile", "expected an object with a \"vertices\" array");
    }
    std::vector<Point2> pts;
    for (const auto& item : j["vertices"]) {
        if (!item.is_array() || item.size() != 2) {
            fail_validation("BadPolygonFile", "each vertex must be a [x, y] pair");
        }
        pts.push_back({item[0].get<double>(), item[1].get<double>()});
    }
    return ConvexPolygon2D::validate(std::move(pts));
}

nlohmann::ordered_json polygon_to_json(const ConvexPolygon2D& poly) {
    nlohmann::ordered_json verts = nlohmann::ordered_json::array();
    for (const Point2& p : poly.vertices()) {
        verts.push_back(nlohmann::ordered_json::array({p.x, p.y}));
    }
    return nlohmann::ordered_json{{"vertices", verts}};
}

}  // namespace conjlab::geom2d
