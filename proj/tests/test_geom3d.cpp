#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "conjlab/geom3d.hpp"
#include "conjlab/rng.hpp"

using namespace conjlab;
using geom3d::Point3;
using geom3d::Polyhedron3D;

namespace {

std::string error_code(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

// Independent point-to-line distance: golden-section minimization of
// |a + t (b - a) - m| over a wide bracket, no projection formula involved.
double line_distance_oracle(Point3 a, Point3 b, Point3 m) {
    auto f = [&](double t) { return norm(a + t * (b - a) - m); };
    double lo = -100.0, hi = 100.0;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < 200; ++i) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    return f(0.5 * (lo + hi));
}

Point3 random_interior(const Polyhedron3D& p, SplitMix64& rng) {
    std::vector<double> w(p.vertices().size());
    double sum = 0.0;
    for (double& x : w) {
        x = std::exp(rng.uniform(-1.5, 1.5));
        sum += x;
    }
    Point3 m;
    for (std::size_t i = 0; i < w.size(); ++i) {
        m = m + (w[i] / sum) * p.vertices()[i];
    }
    return m;
}

Polyhedron3D random_tetrahedron(SplitMix64& rng) {
    while (true) {
        Point3 p[4];
        for (auto& q : p) {
            q = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        }
        const double vol = std::abs(dot(p[1] - p[0], cross(p[2] - p[0], p[3] - p[0]))) / 6.0;
        if (vol < 0.02) continue;
        return geom3d::tetrahedron_from_points(p[0], p[1], p[2], p[3]);
    }
}

}  // namespace

TEST_CASE("validate fixtures") {
    const auto tetra = geom3d::regular_tetrahedron(1.0);
    CHECK(tetra.vertices().size() == 4);
    CHECK(tetra.faces().size() == 4);
    CHECK(tetra.edges().size() == 6);

    const auto box = geom3d::cube(1.0);
    CHECK(box.vertices().size() == 8);
    CHECK(box.faces().size() == 6);
    CHECK(box.edges().size() == 12);
}

TEST_CASE("a reversed face cycle is repaired by outward reorientation") {
    const auto base = geom3d::regular_tetrahedron(1.0);
    auto faces = base.faces();
    std::reverse(faces[0].begin(), faces[0].end());
    const auto fixed = Polyhedron3D::validate(base.vertices(), faces);
    const Point3 centroid = fixed.centroid();
    for (std::size_t f = 0; f < fixed.faces().size(); ++f) {
        Point3 fc;
        for (int idx : fixed.faces()[f]) fc = fc + fixed.vertices()[static_cast<std::size_t>(idx)];
        fc = (1.0 / 3.0) * fc;
        CHECK(dot(fixed.face_planes()[f].normal, fc - centroid) > 0.0);
    }
}

TEST_CASE("validate rejects bad meshes") {
    const auto tetra = geom3d::regular_tetrahedron(1.0);

    SUBCASE("too few faces") {
        auto faces = tetra.faces();
        faces.pop_back();
        CHECK(error_code([&] { Polyhedron3D::validate(tetra.vertices(), faces); }) ==
              "BadTopology");
    }

    SUBCASE("non-planar face") {
        auto verts = geom3d::cube(1.0).vertices();
        verts[0].z += 0.1;
        CHECK(error_code([&] { Polyhedron3D::validate(verts, geom3d::cube(1.0).faces()); }) ==
              "NonPlanarFace");
    }

    SUBCASE("dented solid is not convex") {
        // Replace one tetrahedron face by a fan through a point pushed inside.
        auto verts = tetra.vertices();
        const Point3 centroid = tetra.centroid();
        Point3 fc;
        for (int idx : tetra.faces()[0]) fc = fc + verts[static_cast<std::size_t>(idx)];
        fc = (1.0 / 3.0) * fc;
        verts.push_back(fc + 0.3 * (centroid - fc));
        const auto& f0 = tetra.faces()[0];
        std::vector<std::vector<int>> faces = {tetra.faces()[1], tetra.faces()[2],
                                               tetra.faces()[3]};
        faces.push_back({f0[0], f0[1], 4});
        faces.push_back({f0[1], f0[2], 4});
        faces.push_back({f0[2], f0[0], 4});
        CHECK(error_code([&] { Polyhedron3D::validate(verts, faces); }) == "NotConvex");
    }

    SUBCASE("stray vertex breaks the Euler check") {
        auto verts = tetra.vertices();
        verts.push_back({0.01, 0.0, 0.0});
        CHECK(error_code([&] { Polyhedron3D::validate(verts, tetra.faces()); }) == "BadTopology");
    }

    SUBCASE("duplicated face breaks edge sharing") {
        auto faces = tetra.faces();
        faces.push_back(faces[0]);
        CHECK(error_code([&] { Polyhedron3D::validate(tetra.vertices(), faces); }) ==
              "BadTopology");
    }
}

TEST_CASE("regular tetrahedron fixture") {
    const auto tetra = geom3d::regular_tetrahedron(1.0);
    for (const Point3& v : tetra.vertices()) {
        CHECK(norm(v) == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (const auto& e : geom3d::face_pedal(tetra, {0, 0, 0})) {
        CHECK(e.distance == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
        CHECK(e.inside_face);
    }

    const auto doubled = geom3d::regular_tetrahedron(2.0);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(norm(doubled.vertices()[i] - 2.0 * tetra.vertices()[i]) < 1e-12);
    }

    CHECK(error_code([] { geom3d::regular_tetrahedron(0.0); }) == "NonPositiveRadius");
}

TEST_CASE("contains_interior") {
    const auto tetra = geom3d::regular_tetrahedron(1.0);
    CHECK(geom3d::contains_interior(tetra, {0, 0, 0}));
    CHECK_FALSE(geom3d::contains_interior(tetra, tetra.vertices()[0]));
    CHECK_FALSE(geom3d::contains_interior(geom3d::cube(1.0), {0, 0, 1}));
}

TEST_CASE("face pedal distances") {
    const auto box = geom3d::cube(1.0);
    for (const auto& e : geom3d::face_pedal(box, {0, 0, 0})) {
        CHECK(e.distance == doctest::Approx(1.0).epsilon(1e-12));
    }

    std::vector<double> offcenter;
    for (const auto& e : geom3d::face_pedal(box, {0.5, 0, 0})) offcenter.push_back(e.distance);
    std::sort(offcenter.begin(), offcenter.end());
    const std::vector<double> expect = {0.5, 1.0, 1.0, 1.0, 1.0, 1.5};
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(offcenter[i] == doctest::Approx(expect[i]).epsilon(1e-12));
    }
}

TEST_CASE("edge pedal distances") {
    const auto tetra = geom3d::regular_tetrahedron(1.0);
    const auto entries = geom3d::edge_pedal(tetra, {0, 0, 0});
    REQUIRE(entries.size() == 6);
    for (const auto& e : entries) {
        const Point3 a = tetra.vertices()[static_cast<std::size_t>(e.edge.first)];
        const Point3 b = tetra.vertices()[static_cast<std::size_t>(e.edge.second)];
        CHECK(e.distance == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-9));
        CHECK(e.distance == doctest::Approx(line_distance_oracle(a, b, {0, 0, 0})).epsilon(1e-9));
    }

    for (const auto& e : geom3d::edge_pedal(geom3d::cube(1.0), {0, 0, 0})) {
        CHECK(e.distance == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    }

    SUBCASE("scaling the configuration scales every distance") {
        SplitMix64 rng(5);
        const auto tet = random_tetrahedron(rng);
        const Point3 m = random_interior(tet, rng);
        const double lambda = 3.7;
        std::vector<Point3> scaled;
        for (const Point3& v : tet.vertices()) scaled.push_back(lambda * v);
        const auto tet2 = Polyhedron3D::validate(scaled, tet.faces());
        const auto d1 = geom3d::edge_pedal(tet, m);
        const auto d2 = geom3d::edge_pedal(tet2, lambda * m);
        for (std::size_t i = 0; i < d1.size(); ++i) {
            CHECK(d2[i].distance == doctest::Approx(lambda * d1[i].distance).epsilon(1e-9));
        }
    }

    SUBCASE("points on the edge line have zero line distance") {
        const Point3 a = tetra.vertices()[0];
        const Point3 b = tetra.vertices()[1];
        const Point3 on_line = a + 0.37 * (b - a);
        CHECK(line_distance_oracle(a, b, on_line) < 1e-9);
        // Same formula the implementation uses, evaluated directly.
        const Point3 d = b - a;
        const double t = dot(on_line - a, d) / dot(d, d);
        CHECK(norm(a + t * d - on_line) < 1e-12);
    }
}

TEST_CASE("ratio anchors") {
    const auto tetra = geom3d::regular_tetrahedron(1.0);
    const auto faces = geom3d::em_ratio(tetra, {0, 0, 0}, geom3d::PedalTarget::Faces);
    CHECK(faces.ratio == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(faces.ratio >= geom3d::kTetrahedronFaceFloor);

    const auto edges = geom3d::em_ratio(tetra, {0, 0, 0}, geom3d::PedalTarget::Edges);
    CHECK(edges.ratio == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-9));

    const auto box = geom3d::em_ratio(geom3d::cube(1.0), {0, 0, 0}, geom3d::PedalTarget::Faces);
    CHECK(box.ratio == doctest::Approx(4.0 / std::sqrt(3.0)).epsilon(1e-9));
}

TEST_CASE("ratio invariants over random tetrahedra") {
    SplitMix64 rng(31);
    int floor_findings = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto tet = random_tetrahedron(rng);
        const Point3 m = random_interior(tet, rng);
        if (!geom3d::contains_interior(tet, m)) continue;
        const auto rep = geom3d::em_ratio(tet, m, geom3d::PedalTarget::Faces);

        if (rep.ratio < geom3d::kTetrahedronFaceFloor - 1e-6) {
            ++floor_findings;
            MESSAGE("REPORTABLE COUNTEREXAMPLE: face ratio ", rep.ratio, " below 2*sqrt(2)");
        }

        // Termwise: every face distance is at most the distance to each of
        // that face's vertices.
        const auto pedals = geom3d::face_pedal(tet, m);
        for (std::size_t f = 0; f < pedals.size(); ++f) {
            for (int idx : tet.faces()[f]) {
                CHECK(pedals[f].distance <=
                      norm(tet.vertices()[static_cast<std::size_t>(idx)] - m) + 1e-12);
            }
        }

        // Similarity invariance under rotation + translation + scale.
        const double ang = rng.uniform(0.0, 6.28);
        const double ca = std::cos(ang), sa = std::sin(ang);
        const double scale = rng.uniform(0.2, 5.0);
        const Point3 shift{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
        auto xf = [&](Point3 p) -> Point3 {
            const Point3 rot{p.x * ca - p.y * sa, p.x * sa + p.y * ca, p.z};
            return scale * rot + shift;
        };
        std::vector<Point3> moved;
        for (const Point3& v : tet.vertices()) moved.push_back(xf(v));
        const auto rep2 =
            geom3d::em_ratio(Polyhedron3D::validate(moved, tet.faces()), xf(m), rep.target);
        CHECK(std::abs(rep2.ratio - rep.ratio) < 1e-9);

        // Euler consistency on every accepted shape.
        CHECK(tet.vertices().size() - tet.edges().size() + tet.faces().size() == 2);
    }
    CHECK(floor_findings == 0);
}

TEST_CASE("polyhedron json round trip") {
    const auto box = geom3d::cube(1.0);
    const auto j = geom3d::polyhedron_to_json(box);
    const auto back = geom3d::polyhedron_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.vertices().size() == 8);
    CHECK(back.edges().size() == 12);
    CHECK(error_code([] {
              geom3d::polyhedron_from_json(nlohmann::json::parse("{\"vertices\": []}"));
          }) == "BadMeshFile");
}
