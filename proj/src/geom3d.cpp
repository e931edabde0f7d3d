#include "conjlab/geom3d.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace conjlab::geom3d {

namespace {

double bbox_diag(const std::vector<Point3>& pts) {
    Point3 lo = pts[0], hi = pts[0];
    for (const Point3& p : pts) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    return norm(hi - lo);
}

// Newell's method; robust for arbitrary planar cycles.
Point3 newell_normal(const std::vector<Point3>& pts) {
    Point3 n;
    const std::size_t k = pts.size();
    for (std::size_t i = 0; i < k; ++i) {
        const Point3& a = pts[i];
        const Point3& b = pts[(i + 1) % k];
        n.x += (a.y - b.y) * (a.z + b.z);
        n.y += (a.z - b.z) * (a.x + b.x);
        n.z += (a.x - b.x) * (a.y + b.y);
    }
    return n;
}

}  // namespace

Polyhedron3D Polyhedron3D::validate(std::vector<Point3> vertices,
                                    std::vector<std::vector<int>> faces) {
    if (vertices.size() < 4) {
        fail_validation("BadTopology", "a polyhedron needs at least 4 vertices");
    }
    if (faces.size() < 4) {
        fail_validation("BadTopology", "a polyhedron needs at least 4 faces");
    }
    for (const Point3& p : vertices) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
            fail_validation("NonFiniteCoordinate", "vertex coordinates must be finite");
        }
    }
    const int nv = static_cast<int>(vertices.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const auto& cycle = faces[f];
        if (cycle.size() < 3) {
            fail_validation("BadTopology", "face " + std::to_string(f) + " has fewer than 3 vertices");
        }
        for (int idx : cycle) {
            if (idx < 0 || idx >= nv) {
                fail_validation("BadTopology", "face " + std::to_string(f) + " references vertex " +
                                                   std::to_string(idx) + " out of range");
            }
        }
        for (std::size_t i = 0; i < cycle.size(); ++i) {
            for (std::size_t j = i + 1; j < cycle.size(); ++j) {
                if (cycle[i] == cycle[j]) {
                    fail_validation("BadTopology",
                                    "face " + std::to_string(f) + " repeats vertex " +
                                        std::to_string(cycle[i]));
                }
            }
        }
    }

    const double diag = bbox_diag(vertices);
    if (diag <= 0.0) fail_validation("BadTopology", "all vertices coincide");
    const double plane_tol = kPlanarityRelTol * diag;

    Point3 solid_centroid;
    for (const Point3& p : vertices) solid_centroid = solid_centroid + p;
    solid_centroid = (1.0 / static_cast<double>(vertices.size())) * solid_centroid;

    // Fit a plane per face, then orient it outward from the centroid.
    std::vector<FacePlane> planes;
    planes.reserve(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
        std::vector<Point3> pts;
        pts.reserve(faces[f].size());
        for (int idx : faces[f]) pts.push_back(vertices[static_cast<std::size_t>(idx)]);
        Point3 n = newell_normal(pts);
        const double len = norm(n);
        if (len <= plane_tol * diag) {
            fail_validation("NonPlanarFace", "face " + std::to_string(f) + " is degenerate");
        }
        n = (1.0 / len) * n;
        Point3 face_centroid;
        for (const Point3& p : pts) face_centroid = face_centroid + p;
        face_centroid = (1.0 / static_cast<double>(pts.size())) * face_centroid;
        double offset = dot(n, face_centroid);
        for (const Point3& p : pts) {
            if (std::abs(dot(n, p) - offset) > plane_tol) {
                fail_validation("NonPlanarFace",
                                "face " + std::to_string(f) + " deviates from a plane");
            }
        }
        if (dot(n, face_centroid - solid_centroid) < 0.0) {
            n = -1.0 * n;
            offset = -offset;
        }
        planes.push_back({n, offset});
    }

    // Derive edges; every undirected edge must be shared by exactly 2 faces.
    std::vector<std::pair<int, int>> edges;
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& cycle : faces) {
        const std::size_t k = cycle.size();
        for (std::size_t i = 0; i < k; ++i) {
            const int a = cycle[i];
            const int b = cycle[(i + 1) % k];
            const auto key = std::minmax(a, b);
            auto [it, inserted] = edge_count.emplace(key, 0);
            if (inserted) edges.push_back(key);
            ++it->second;
        }
    }
    for (const auto& [key, count] : edge_count) {
        if (count != 2) {
            fail_validation("BadTopology", "edge (" + std::to_string(key.first) + "," +
                                               std::to_string(key.second) + ") is shared by " +
                                               std::to_string(count) + " faces, expected 2");
        }
    }
    const long long euler = static_cast<long long>(vertices.size()) -
                            static_cast<long long>(edges.size()) +
                            static_cast<long long>(faces.size());
    if (euler != 2) {
        fail_validation("BadTopology",
                        "Euler check failed: V - E + F = " + std::to_string(euler));
    }

    // Convexity: every vertex on or inside every face plane.
    for (std::size_t f = 0; f < planes.size(); ++f) {
        for (const Point3& p : vertices) {
            if (dot(planes[f].normal, p) > planes[f].offset + plane_tol) {
                fail_validation("NotConvex", "vertex outside face plane " + std::to_string(f));
            }
        }
    }

    Polyhedron3D out;
    out.verts_ = std::move(vertices);
    out.faces_ = std::move(faces);
    out.planes_ = std::move(planes);
    out.edges_ = std::move(edges);
    out.diag_ = diag;
    return out;
}

Point3 Polyhedron3D::centroid() const {
    Point3 c;
    for (const Point3& p : verts_) c = c + p;
    return (1.0 / static_cast<double>(verts_.size())) * c;
}

Polyhedron3D regular_tetrahedron(double circumradius) {
    if (!(circumradius > 0.0)) {
        fail_validation("NonPositiveRadius", "circumradius must be positive");
    }
    const double s = circumradius / std::sqrt(3.0);
    std::vector<Point3> v = {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
    std::vector<std::vector<int>> f = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
    return Polyhedron3D::validate(std::move(v), std::move(f));
}

Polyhedron3D cube(double half_extent) {
    if (!(half_extent > 0.0)) {
        fail_validation("NonPositiveRadius", "half extent must be positive");
    }
    const double h = half_extent;
    std::vector<Point3> v = {{-h, -h, -h}, {h, -h, -h}, {h, h, -h}, {-h, h, -h},
                             {-h, -h, h},  {h, -h, h},  {h, h, h},  {-h, h, h}};
    std::vector<std::vector<int>> f = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                       {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
    return Polyhedron3D::validate(std::move(v), std::move(f));
}

Polyhedron3D tetrahedron_from_points(const Point3& a, const Point3& b, const Point3& c,
                                     const Point3& d) {
    std::vector<Point3> v = {a, b, c, d};
    std::vector<std::vector<int>> f = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
    return Polyhedron3D::validate(std::move(v), std::move(f));
}

bool contains_interior(const Polyhedron3D& p, Point3 m) {
    if (!std::isfinite(m.x) || !std::isfinite(m.y) || !std::isfinite(m.z)) return false;
    for (const FacePlane& pl : p.face_planes()) {
        if (pl.offset - dot(pl.normal, m) <= kInteriorTol) return false;
    }
    return true;
}

namespace {

void require_interior(const Polyhedron3D& p, Point3 m) {
    if (!contains_interior(p, m)) {
        fail_validation("ProbeNotInterior", "probe point is not strictly inside the polyhedron");
    }
}

}  // namespace

std::vector<double> vertex_distances(const Polyhedron3D& p, Point3 m) {
    require_interior(p, m);
    std::vector<double> out;
    out.reserve(p.vertices().size());
    for (const Point3& v : p.vertices()) out.push_back(distance(m, v));
    return out;
}

std::vector<FacePedalEntry> face_pedal(const Polyhedron3D& p, Point3 m) {
    require_interior(p, m);
    std::vector<FacePedalEntry> out;
    out.reserve(p.faces().size());
    for (std::size_t f = 0; f < p.faces().size(); ++f) {
        const FacePlane& pl = p.face_planes()[f];
        const double d = pl.offset - dot(pl.normal, m);
        FacePedalEntry e;
        e.face_index = static_cast<int>(f);
        e.distance = d;
        e.foot = m + d * pl.normal;
        // In-face test: the foot must be on the same side of every face edge.
        const auto& cycle = p.faces()[f];
        const std::size_t k = cycle.size();
        bool all_nonneg = true, all_nonpos = true;
        for (std::size_t i = 0; i < k; ++i) {
            const Point3 a = p.vertices()[static_cast<std::size_t>(cycle[i])];
            const Point3 b = p.vertices()[static_cast<std::size_t>(cycle[(i + 1) % k])];
            const double side = dot(pl.normal, cross(b - a, e.foot - a));
            if (side < -kInteriorTol) all_nonneg = false;
            if (side > kInteriorTol) all_nonpos = false;
        }
        e.inside_face = all_nonneg || all_nonpos;
        out.push_back(e);
    }
    return out;
}

std::vector<EdgePedalEntry> edge_pedal(const Polyhedron3D& p, Point3 m) {
    require_interior(p, m);
    std::vector<EdgePedalEntry> out;
    out.reserve(p.edges().size());
    for (std::size_t i = 0; i < p.edges().size(); ++i) {
        const auto [ia, ib] = p.edges()[i];
        const Point3 a = p.vertices()[static_cast<std::size_t>(ia)];
        const Point3 b = p.vertices()[static_cast<std::size_t>(ib)];
        const Point3 d = b - a;
        const double t = dot(m - a, d) / dot(d, d);
        EdgePedalEntry e;
        e.edge_index = static_cast<int>(i);
        e.edge = {ia, ib};
        e.foot = a + t * d;
        e.distance = distance(m, e.foot);
        out.push_back(e);
    }
    return out;
}

const char* to_string(PedalTarget t) {
    return t == PedalTarget::Faces ? "faces" : "edges";
}

RatioReport3 em_ratio(const Polyhedron3D& p, Point3 m, PedalTarget target) {
    RatioReport3 r;
    r.target = target;
    r.probe = m;
    for (double d : vertex_distances(p, m)) r.sum_vertex += d;
    if (target == PedalTarget::Faces) {
        for (const auto& e : face_pedal(p, m)) r.sum_pedal += e.distance;
    } else {
        for (const auto& e : edge_pedal(p, m)) r.sum_pedal += e.distance;
    }
    r.ratio = r.sum_vertex / r.sum_pedal;
    return r;
}

Polyhedron3D polyhedron_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("vertices") || !j.contains("faces") ||
        !j["vertices"].is_array() || !j["faces"].is_array()) {
        fail_validation("BadMeshFile",
                        "expected an object with \"vertices\" and \"faces\" arrays");
    }
    std::vector<Point3> verts;
    for (const auto& item : j["vertices"]) {
        if (!item.is_array() || item.size() != 3) {
            fail_validation("BadMeshFile", "each vertex must be a [x, y, z] triple");
        }
        verts.push_back({item[0].get<double>(), item[1].get<double>(), item[2].get<double>()});
    }
    std::vector<std::vector<int>> faces;
    for (const auto& item : j["faces"]) {
        if (!item.is_array()) fail_validation("BadMeshFile", "each face must be an index array");
        faces.push_back(item.get<std::vector<int>>());
    }
    return Polyhedron3D::validate(std::move(verts), std::move(faces));
}

nlohmann::ordered_json polyhedron_to_json(const Polyhedron3D& p) {
    nlohmann::ordered_json verts = nlohmann::ordered_json::array();
    for (const Point3& v : p.vertices()) {
        verts.push_back(nlohmann::ordered_json::array({v.x, v.y, v.z}));
    }
    nlohmann::ordered_json faces = nlohmann::ordered_json::array();
    for (const auto& f : p.faces()) faces.push_back(f);
    return nlohmann::ordered_json{{"vertices", verts}, {"faces", faces}};
}

}  // namespace conjlab::geom3d
