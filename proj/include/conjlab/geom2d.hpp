#pragma once

#include <cmath>
#include <vector>

#include "json.hpp"

#include "conjlab/error.hpp"

namespace conjlab::geom2d {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }

// Strict-convexity tolerance: cross products of consecutive edges must
// exceed this times (bounding-box diagonal)^2.
inline constexpr double kConvexityRelTol = 1e-12;
// Probes within this absolute distance of a side line count as boundary and
// are rejected as interior points.
inline constexpr double kInteriorTol = 1e-12;

// Strictly convex polygon with counterclockwise vertex order. The only way
// to construct one is validate(), so every instance satisfies the
// invariants (no collinear triples, no repeated vertices, signed area > 0).
class ConvexPolygon2D {
public:
    // Accepts either orientation and reverses clockwise input. Throws
    // TooFewVertices, DuplicateVertex or NotConvex.
    static ConvexPolygon2D validate(std::vector<Point2> points);

    const std::vector<Point2>& vertices() const { return verts_; }
    int size() const { return static_cast<int>(verts_.size()); }
    Point2 vertex(int i) const { return verts_[static_cast<std::size_t>(i) % verts_.size()]; }
    double bbox_diagonal() const { return diag_; }
    Point2 centroid() const;

private:
    explicit ConvexPolygon2D(std::vector<Point2> v, double diag)
        : verts_(std::move(v)), diag_(diag) {}

    std::vector<Point2> verts_;
    double diag_;
};

// One pedal point. The foot lies on the supporting line of side
// A_i -> A_{i+1}, not clamped to the segment; segment_t records where on
// the segment it fell (0..1 means inside) and inside_segment flags it.
struct PedalEntry {
    int side_index = 0;
    Point2 foot;
    double distance = 0.0;
    double segment_t = 0.0;
    bool inside_segment = false;
};

struct PedalSet {
    double angle_deg = 90.0;
    std::vector<PedalEntry> entries;
    double sum() const;
};

struct RatioReport {
    double sum_vertex = 0.0;
    double sum_pedal = 0.0;
    double ratio = 0.0;
    double angle_deg = 90.0;
    Point2 probe;
};

// True iff m is strictly inside (boundary within kInteriorTol counts as
// outside).
bool contains_interior(const ConvexPolygon2D& poly, Point2 m);

// |MA_i| in vertex order. Throws ProbeNotInterior.
std::vector<double> vertex_distances(const ConvexPolygon2D& poly, Point2 m);

// Feet of perpendiculars from m onto each side's supporting line.
PedalSet perpendicular_pedal(const ConvexPolygon2D& poly, Point2 m);

// Pedal points under an oriented angle: the foot P_i is the point of the
// supporting line where the counterclockwise angle from the side direction
// A_i -> A_{i+1} to the vector P_i -> M equals angle_deg. Its distance is
// the perpendicular distance divided by sin(angle_deg). Throws
// DegenerateAngle unless 0 < angle_deg < 180.
PedalSet oblique_pedal(const ConvexPolygon2D& poly, Point2 m, double angle_deg);

RatioReport em_ratio(const ConvexPolygon2D& poly, Point2 m, double angle_deg = 90.0);

// Regular n-gon with unit circumradius centered at the origin, first vertex
// on the +x axis.
ConvexPolygon2D regular_polygon(int n);

// Conjectured infimum of the ratio for convex n-gons at the given angle:
// sec(pi/n) scaled by sin(angle). Established only for n = 3 (the
// triangle case equals 2); larger n are the open constants this project
// estimates.
double conjectured_floor(int n, double angle_deg);

// File format: {"vertices": [[x, y], ...]}
ConvexPolygon2D polygon_from_json(const nlohmann::json& j);
nlohmann::ordered_json polygon_to_json(const ConvexPolygon2D& poly);

}  // namespace conjlab::geom2d
