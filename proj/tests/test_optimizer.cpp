#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "conjlab/jsontext.hpp"
#include "conjlab/optimizer.hpp"

using namespace conjlab;
using opt::OptimizerConfig;

namespace {

OptimizerConfig quick_config(std::uint64_t seed, int restarts = 4, int inner = 150,
                             int outer = 150) {
    OptimizerConfig cfg;
    cfg.seed = seed;
    cfg.restarts = restarts;
    cfg.inner_iterations = inner;
    cfg.outer_iterations = outer;
    return cfg;
}

std::string error_code(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

}  // namespace

TEST_CASE("nelder_mead on standard functions") {
    OptimizerConfig cfg;
    cfg.inner_iterations = 500;

    SUBCASE("shifted quadratic") {
        auto f = [](std::span<const double> x) { return (x[0] - 3.0) * (x[0] - 3.0); };
        const std::vector<double> start = {0.0};
        const auto res = opt::nelder_mead(f, start, cfg);
        CHECK(std::abs(res.argmin[0] - 3.0) < 1e-6);
        CHECK(res.value <= f(start));
        CHECK(res.converged);
    }

    SUBCASE("bowl") {
        auto f = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; };
        const std::vector<double> start = {1.0, 1.0};
        const auto res = opt::nelder_mead(f, start, cfg);
        CHECK(res.value <= 1e-10);
    }

    SUBCASE("rosenbrock within budget 2000") {
        auto f = [](std::span<const double> x) {
            const double a = 1.0 - x[0];
            const double b = x[1] - x[0] * x[0];
            return a * a + 100.0 * b * b;
        };
        // Coarse grid-search oracle over [-2, 2]^2.
        double grid_best = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 80; ++i) {
            for (int j = 0; j <= 80; ++j) {
                const std::vector<double> p = {-2.0 + i * 0.05, -2.0 + j * 0.05};
                grid_best = std::min(grid_best, f(p));
            }
        }
        const std::vector<double> start = {-1.2, 1.0};
        const auto res = opt::nelder_mead(f, start, 0.25, 2000, 1e-12, 1e-15);
        CHECK(res.value < 1e-4);
        CHECK(res.value <= grid_best);
    }

    SUBCASE("non-finite objective at the start point") {
        auto f = [](std::span<const double>) { return std::numeric_limits<double>::quiet_NaN(); };
        const std::vector<double> start = {0.0};
        CHECK(error_code([&] { opt::nelder_mead(f, start, cfg); }) == "ObjectiveNotFinite");
    }

    SUBCASE("non-finite values past the start are treated as rejections") {
        auto f = [](std::span<const double> x) {
            if (x[0] > 1.0) return std::numeric_limits<double>::infinity();
            return (x[0] - 1.0) * (x[0] - 1.0);
        };
        const std::vector<double> start = {0.0};
        const auto res = opt::nelder_mead(f, start, cfg);
        CHECK(res.value < 1e-8);
    }
}

TEST_CASE("inner_min_probe finds the known minimizers") {
    SUBCASE("equilateral triangle") {
        const auto tri = geom2d::regular_polygon(3);
        const auto res = opt::inner_min_probe(tri, 90.0, quick_config(3, 4, 400));
        CHECK(res.min_ratio == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(std::abs(res.probe[0]) < 1e-3);
        CHECK(std::abs(res.probe[1]) < 1e-3);
    }

    SUBCASE("square, against a dense probe grid") {
        const auto sq = geom2d::ConvexPolygon2D::validate({{1, 1}, {-1, 1}, {-1, -1}, {1, -1}});
        double grid_best = std::numeric_limits<double>::infinity();
        for (int i = 1; i < 100; ++i) {
            for (int j = 1; j < 100; ++j) {
                const geom2d::Point2 m{-1.0 + 0.02 * i, -1.0 + 0.02 * j};
                grid_best = std::min(grid_best, geom2d::em_ratio(sq, m).ratio);
            }
        }
        const auto res = opt::inner_min_probe(sq, 90.0, quick_config(4, 4, 400));
        CHECK(std::abs(res.min_ratio - std::sqrt(2.0)) < 1e-4);
        CHECK(res.min_ratio <= grid_best + 1e-9);
    }

    SUBCASE("regular tetrahedron faces, against a barycentric grid") {
        const auto tetra = geom3d::regular_tetrahedron(1.0);
        double grid_best = std::numeric_limits<double>::infinity();
        const int steps = 12;
        for (int i = 1; i < steps; ++i) {
            for (int j = 1; i + j < steps; ++j) {
                for (int k = 1; i + j + k < steps; ++k) {
                    const double w0 = double(i) / steps, w1 = double(j) / steps,
                                 w2 = double(k) / steps;
                    const double w3 = 1.0 - w0 - w1 - w2;
                    if (w3 <= 0) continue;
                    geom3d::Point3 m = w0 * tetra.vertices()[0] + w1 * tetra.vertices()[1] +
                                       w2 * tetra.vertices()[2] + w3 * tetra.vertices()[3];
                    grid_best = std::min(
                        grid_best,
                        geom3d::em_ratio(tetra, m, geom3d::PedalTarget::Faces).ratio);
                }
            }
        }
        const auto res =
            opt::inner_min_probe(tetra, geom3d::PedalTarget::Faces, quick_config(5, 4, 400));
        CHECK(std::abs(res.min_ratio - 3.0) < 1e-4);
        CHECK(res.min_ratio <= grid_best + 1e-9);
    }
}

TEST_CASE("sample_convex_polygon") {
    SUBCASE("always valid, any n") {
        for (int n : {3, 4, 8, 16, 64}) {
            SplitMix64 rng(static_cast<std::uint64_t>(n) * 101);
            for (int trial = 0; trial < (n == 64 ? 5 : 40); ++trial) {
                const auto poly = opt::sample_convex_polygon(n, rng);
                CHECK(poly.size() == n);
            }
        }
    }

    SUBCASE("deterministic per seed") {
        SplitMix64 rng1(12345), rng2(12345);
        const auto p1 = opt::sample_convex_polygon(6, rng1);
        const auto p2 = opt::sample_convex_polygon(6, rng2);
        for (int i = 0; i < 6; ++i) {
            CHECK(p1.vertex(i).x == p2.vertex(i).x);
            CHECK(p1.vertex(i).y == p2.vertex(i).y);
        }
    }

    SUBCASE("radii stay within the documented band") {
        SplitMix64 rng(777);
        const auto poly = opt::sample_convex_polygon(7, rng);
        for (int i = 0; i < 7; ++i) {
            const double r = norm(poly.vertex(i));
            CHECK(r >= 0.2 - 1e-12);
            CHECK(r <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("estimate_constant_2d") {
    const auto est = opt::estimate_constant_2d(3, 90.0, quick_config(7, 4));
    CHECK(est.min_ratio >= 2.0 - 1e-3);
    CHECK(est.min_ratio <= 2.1);
    CHECK(est.n == 3);
    CHECK(est.target == "sides");
    CHECK_FALSE(est.counterexample);

    SUBCASE("soundness: the argmin re-evaluates to min_ratio") {
        const auto poly = geom2d::polygon_from_json(nlohmann::json::parse(est.shape.dump()));
        const geom2d::Point2 m{est.probe[0], est.probe[1]};
        CHECK(std::abs(geom2d::em_ratio(poly, m, est.angle_deg).ratio - est.min_ratio) < 1e-9);
    }

    SUBCASE("bitwise determinism") {
        const auto again = opt::estimate_constant_2d(3, 90.0, quick_config(7, 4));
        CHECK(jsontext::dump(again.to_json()) == jsontext::dump(est.to_json()));
    }

    SUBCASE("restart monotonicity") {
        const auto fewer = opt::estimate_constant_2d(3, 90.0, quick_config(7, 2));
        CHECK(est.min_ratio <= fewer.min_ratio + 1e-15);
    }

    SUBCASE("oblique identity at the estimate level") {
        const auto oblique = opt::estimate_constant_2d(3, 30.0, quick_config(7, 4));
        CHECK(std::abs(oblique.min_ratio - 1.0) < 1e-2);
        CHECK(oblique.floor == doctest::Approx(1.0).epsilon(1e-12));
    }

    CHECK(error_code([] { opt::estimate_constant_2d(2, 90.0, quick_config(1)); }) ==
          "TooFewVertices");
    CHECK(error_code([] { opt::estimate_constant_2d(3, 180.0, quick_config(1)); }) ==
          "DegenerateAngle");
    CHECK(error_code([] {
              auto cfg = quick_config(1);
              cfg.restarts = 0;
              opt::estimate_constant_2d(3, 90.0, cfg);
          }) == "BadConfig");
}

TEST_CASE("estimate_constant_3d") {
    SUBCASE("faces stay inside the conjectured bracket") {
        const auto est = opt::estimate_constant_3d(opt::ShapeFamily3D::Tetrahedron,
                                                   geom3d::PedalTarget::Faces, quick_config(11, 4));
        CHECK(est.min_ratio >= geom3d::kTetrahedronFaceFloor - 1e-3);
        CHECK(est.min_ratio <= 3.0 + 1e-9);
        CHECK_FALSE(est.counterexample);
        CHECK(est.family == "tetrahedron");

        const auto mesh = geom3d::polyhedron_from_json(nlohmann::json::parse(est.shape.dump()));
        const geom3d::Point3 m{est.probe[0], est.probe[1], est.probe[2]};
        CHECK(std::abs(geom3d::em_ratio(mesh, m, geom3d::PedalTarget::Faces).ratio -
                       est.min_ratio) < 1e-9);
    }

    SUBCASE("edges reach the regular fixture value") {
        const auto est = opt::estimate_constant_3d(opt::ShapeFamily3D::Tetrahedron,
                                                   geom3d::PedalTarget::Edges, quick_config(13, 4));
        CHECK(est.min_ratio <= 2.0 / std::sqrt(3.0) + 1e-6);
        CHECK(std::isnan(est.floor));
        CHECK_FALSE(est.counterexample);
    }

    SUBCASE("fixed user mesh minimizes over probes only") {
        const auto box = geom3d::cube(1.0);
        const auto est = opt::estimate_constant_3d(opt::ShapeFamily3D::UserMesh,
                                                   geom3d::PedalTarget::Faces, quick_config(17, 6),
                                                   &box);
        CHECK(est.family == "user_mesh");
        // The cube's probe minimum sits at the center, 8*sqrt(3)/6.
        CHECK(std::abs(est.min_ratio - 4.0 / std::sqrt(3.0)) < 1e-4);
    }
}
