#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "json.hpp"

#include "conjlab/error.hpp"

namespace conjlab::geom3d {

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline Point3 operator+(Point3 a, Point3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Point3 operator-(Point3 a, Point3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Point3 operator*(double s, Point3 p) { return {s * p.x, s * p.y, s * p.z}; }
inline double dot(Point3 a, Point3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Point3 cross(Point3 a, Point3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Point3 a) { return std::sqrt(dot(a, a)); }
inline double distance(Point3 a, Point3 b) { return norm(b - a); }

// Face planarity and convexity tolerance, relative to the bounding-box
// diagonal.
inline constexpr double kPlanarityRelTol = 1e-9;
// Absolute boundary tolerance for interior probes, matching the 2D rule.
inline constexpr double kInteriorTol = 1e-12;

// Outward-oriented supporting plane: dot(normal, x) == offset on the plane,
// dot(normal, x) < offset strictly inside.
struct FacePlane {
    Point3 normal;  // unit length
    double offset = 0.0;
};

// Convex polyhedron given as vertices plus face cycles. Edges are always
// derived from the face cycles, never supplied, so the two can not drift
// apart. Face normals are recomputed to point outward from the vertex
// centroid, so the input cycles may wind either way.
class Polyhedron3D {
public:
    // Throws BadTopology, NonPlanarFace or NotConvex.
    static Polyhedron3D validate(std::vector<Point3> vertices,
                                 std::vector<std::vector<int>> faces);

    const std::vector<Point3>& vertices() const { return verts_; }
    const std::vector<std::vector<int>>& faces() const { return faces_; }
    const std::vector<FacePlane>& face_planes() const { return planes_; }
    // Derived edges in first-seen face order, each pair stored (lo, hi).
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    double bbox_diagonal() const { return diag_; }
    Point3 centroid() const;

private:
    Polyhedron3D() = default;

    std::vector<Point3> verts_;
    std::vector<std::vector<int>> faces_;
    std::vector<FacePlane> planes_;
    std::vector<std::pair<int, int>> edges_;
    double diag_ = 0.0;
};

// Regular tetrahedron centered at the origin with the given circumradius.
// Throws NonPositiveRadius.
Polyhedron3D regular_tetrahedron(double circumradius);

// Axis-aligned cube [-h, h]^3. Throws NonPositiveRadius.
Polyhedron3D cube(double half_extent = 1.0);

// Tetrahedron from four corner points in any order; throws if degenerate.
Polyhedron3D tetrahedron_from_points(const Point3& a, const Point3& b, const Point3& c,
                                     const Point3& d);

bool contains_interior(const Polyhedron3D& p, Point3 m);

std::vector<double> vertex_distances(const Polyhedron3D& p, Point3 m);

struct FacePedalEntry {
    int face_index = 0;
    Point3 foot;
    double distance = 0.0;
    bool inside_face = false;  // whether the foot landed inside the face polygon
};

struct EdgePedalEntry {
    int edge_index = 0;
    std::pair<int, int> edge;
    Point3 foot;
    double distance = 0.0;
};

// Perpendicular distances from m to every face plane, in face order.
std::vector<FacePedalEntry> face_pedal(const Polyhedron3D& p, Point3 m);

// Perpendicular distances from m to every edge line (the infinite line
// through the edge's endpoints), in derived edge order.
std::vector<EdgePedalEntry> edge_pedal(const Polyhedron3D& p, Point3 m);

enum class PedalTarget { Faces, Edges };
const char* to_string(PedalTarget t);

struct RatioReport3 {
    double sum_vertex = 0.0;
    double sum_pedal = 0.0;
    double ratio = 0.0;
    PedalTarget target = PedalTarget::Faces;
    Point3 probe;
};

RatioReport3 em_ratio(const Polyhedron3D& p, Point3 m, PedalTarget target);

// The tetrahedron face-pedal bound conjectured to be best possible.
inline const double kTetrahedronFaceFloor = 2.0 * std::sqrt(2.0);

// File format: {"vertices": [[x,y,z],...], "faces": [[i0,i1,...],...]},
// 0-based indices.
Polyhedron3D polyhedron_from_json(const nlohmann::json& j);
nlohmann::ordered_json polyhedron_to_json(const Polyhedron3D& p);

}  // namespace conjlab::geom3d
