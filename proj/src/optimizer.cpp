#include "conjlab/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace conjlab::opt {

namespace {

constexpr double kRejected = 1e300;   // invalid shape or boundary probe
constexpr double kNonFinite = 1e308;  // stand-in for NaN/inf past the start point

}  // namespace

void OptimizerConfig::validate() const {
    if (restarts < 1) fail_validation("BadConfig", "restarts must be >= 1");
    if (inner_iterations < 1) fail_validation("BadConfig", "inner_iterations must be >= 1");
    if (outer_iterations < 1) fail_validation("BadConfig", "outer_iterations must be >= 1");
    if (!(simplex_tolerance > 0.0)) fail_validation("BadConfig", "simplex_tolerance must be > 0");
    if (!(shrink_floor > 0.0)) fail_validation("BadConfig", "shrink_floor must be > 0");
}

int thread_cap() {
    if (const char* env = std::getenv("CONJLAB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v <= 1024) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

NelderMeadResult nelder_mead(const Objective& f, std::span<const double> start,
                             const OptimizerConfig& cfg) {
    return nelder_mead(f, start, 0.25, cfg.inner_iterations, cfg.simplex_tolerance,
                       cfg.shrink_floor);
}

NelderMeadResult nelder_mead(const Objective& f, std::span<const double> start,
                             double initial_step, int max_iterations, double tolerance,
                             double shrink_floor) {
    const int n = static_cast<int>(start.size());
    if (n < 1) fail_validation("BadConfig", "objective dimension must be >= 1");

    NelderMeadResult result;
    result.argmin.assign(start.begin(), start.end());
    result.value = std::numeric_limits<double>::infinity();

    bool first_eval = true;
    auto eval = [&](const std::vector<double>& x) {
        double v = f(std::span<const double>(x));
        ++result.evaluations;
        if (!std::isfinite(v)) {
            if (first_eval) {
                fail_validation("ObjectiveNotFinite",
                                "objective is not finite at the start point");
            }
            v = kNonFinite;
        }
        first_eval = false;
        if (v < result.value) {
            result.value = v;
            result.argmin = x;
        }
        return v;
    };

    // Dimension-adaptive coefficients; plain Nelder-Mead values for n = 1.
    const double nd = static_cast<double>(n);
    const double refl = 1.0;
    const double expn = n > 1 ? 1.0 + 2.0 / nd : 2.0;
    const double ctr = n > 1 ? 0.75 - 1.0 / (2.0 * nd) : 0.5;
    const double shrk = n > 1 ? 1.0 - 1.0 / nd : 0.5;

    std::vector<std::vector<double>> x(static_cast<std::size_t>(n) + 1,
                                       std::vector<double>(start.begin(), start.end()));
    std::vector<double> fx(static_cast<std::size_t>(n) + 1);
    for (int i = 1; i <= n; ++i) {
        x[static_cast<std::size_t>(i)][static_cast<std::size_t>(i - 1)] += initial_step;
    }
    for (std::size_t i = 0; i < x.size(); ++i) fx[i] = eval(x[i]);

    std::vector<std::size_t> order(x.size());
    std::vector<double> centroid(static_cast<std::size_t>(n));
    std::vector<double> cand(static_cast<std::size_t>(n));

    for (int iter = 0; iter < max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[order.size() - 2];

        double diameter = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (int d = 0; d < n; ++d) {
                diameter = std::max(
                    diameter, std::abs(x[i][static_cast<std::size_t>(d)] -
                                       x[best][static_cast<std::size_t>(d)]));
            }
        }
        if (diameter < tolerance || diameter < shrink_floor) {
            result.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (i == worst) continue;
            for (int d = 0; d < n; ++d) {
                centroid[static_cast<std::size_t>(d)] += x[i][static_cast<std::size_t>(d)];
            }
        }
        for (double& c : centroid) c /= nd;

        auto blend = [&](double coeff) {
            for (int d = 0; d < n; ++d) {
                const std::size_t dd = static_cast<std::size_t>(d);
                cand[dd] = centroid[dd] + coeff * (centroid[dd] - x[worst][dd]);
            }
        };

        blend(refl);
        const double fr = eval(cand);
        if (fr < fx[best]) {
            const std::vector<double> reflected = cand;
            blend(expn);
            const double fe = eval(cand);
            if (fe < fr) {
                x[worst] = cand;
                fx[worst] = fe;
            } else {
                x[worst] = reflected;
                fx[worst] = fr;
            }
        } else if (fr < fx[second_worst]) {
            x[worst] = cand;
            fx[worst] = fr;
        } else {
            bool accepted = false;
            if (fr < fx[worst]) {
                blend(ctr);  // outside contraction
                const double fc = eval(cand);
                if (fc <= fr) {
                    x[worst] = cand;
                    fx[worst] = fc;
                    accepted = true;
                }
            } else {
                blend(-ctr);  // inside contraction
                const double fc = eval(cand);
                if (fc < fx[worst]) {
                    x[worst] = cand;
                    fx[worst] = fc;
                    accepted = true;
                }
            }
            if (!accepted) {
                for (std::size_t i = 0; i < x.size(); ++i) {
                    if (i == best) continue;
                    for (int d = 0; d < n; ++d) {
                        const std::size_t dd = static_cast<std::size_t>(d);
                        x[i][dd] = x[best][dd] + shrk * (x[i][dd] - x[best][dd]);
                    }
                    fx[i] = eval(x[i]);
                }
            }
        }
    }
    return result;
}

namespace {

// ---- probe parameterization -------------------------------------------

template <typename Point>
Point softmax_blend(const std::vector<Point>& verts, std::span<const double> u) {
    double umax = u[0];
    for (double v : u) umax = std::max(umax, v);
    double wsum = 0.0;
    Point acc{};
    for (std::size_t i = 0; i < verts.size(); ++i) {
        const double w = std::exp(std::clamp(u[i] - umax, -80.0, 0.0));
        wsum += w;
        acc = acc + w * verts[i];
    }
    return (1.0 / wsum) * acc;
}

template <typename Point, typename RatioFn>
ProbeResult inner_min_core(const std::vector<Point>& verts, const RatioFn& ratio_at,
                           const OptimizerConfig& cfg) {
    const std::size_t nv = verts.size();
    ProbeResult best;
    best.min_ratio = std::numeric_limits<double>::infinity();
    Point best_point{};

    auto objective = [&](std::span<const double> u) -> double {
        const Point probe = softmax_blend(verts, u);
        double value = kRejected;
        try {
            value = ratio_at(probe);
        } catch (const Error&) {
            // boundary-grazing probe under extreme weights; reject
        }
        ++best.evaluations;
        if (value < best.min_ratio) {
            best.min_ratio = value;
            best_point = probe;
        }
        return value;
    };

    for (int r = 0; r < cfg.restarts; ++r) {
        SplitMix64 rng(derive_stream(cfg.seed, static_cast<std::uint64_t>(r)));
        std::vector<double> u0(nv, 0.0);
        if (r != 0) {
            for (double& v : u0) v = rng.uniform(-2.0, 2.0);
        }
        const NelderMeadResult res = nelder_mead(objective, u0, 0.5, cfg.inner_iterations,
                                                 cfg.simplex_tolerance, cfg.shrink_floor);
        best.converged = best.converged || res.converged;
    }
    if (!(best.min_ratio < kRejected)) {
        fail_validation("BudgetTooSmall", "no interior probe could be evaluated");
    }
    if constexpr (requires { best_point.z; }) {
        best.probe = {best_point.x, best_point.y, best_point.z};
    } else {
        best.probe = {best_point.x, best_point.y};
    }
    return best;
}

}  // namespace

ProbeResult inner_min_probe(const geom2d::ConvexPolygon2D& poly, double angle_deg,
                            const OptimizerConfig& cfg) {
    cfg.validate();
    return inner_min_core(
        poly.vertices(),
        [&](geom2d::Point2 m) { return geom2d::em_ratio(poly, m, angle_deg).ratio; }, cfg);
}

ProbeResult inner_min_probe(const geom3d::Polyhedron3D& poly, geom3d::PedalTarget target,
                            const OptimizerConfig& cfg) {
    cfg.validate();
    return inner_min_core(
        poly.vertices(),
        [&](geom3d::Point3 m) { return geom3d::em_ratio(poly, m, target).ratio; }, cfg);
}

geom2d::ConvexPolygon2D sample_convex_polygon(int n, SplitMix64& rng) {
    if (n < 3) fail_validation("TooFewVertices", "a polygon needs at least 3 vertices");
    const std::size_t un = static_cast<std::size_t>(n);

    auto draw_angles = [&]() {
        std::vector<double> angles(un);
        for (int attempt = 0; attempt < 1000; ++attempt) {
            for (double& a : angles) a = rng.uniform(0.0, 2.0 * std::numbers::pi);
            std::sort(angles.begin(), angles.end());
            double min_gap = 2.0 * std::numbers::pi + angles.front() - angles.back();
            for (std::size_t i = 1; i < un; ++i) {
                min_gap = std::min(min_gap, angles[i] - angles[i - 1]);
            }
            if (min_gap > 1e-3) return angles;
        }
        throw std::logic_error("angle sampling retry cap exhausted");
    };

    auto build = [&](const std::vector<double>& angles, const std::vector<double>& radii) {
        std::vector<geom2d::Point2> pts(un);
        for (std::size_t i = 0; i < un; ++i) {
            pts[i] = {radii[i] * std::cos(angles[i]), radii[i] * std::sin(angles[i])};
        }
        return pts;
    };

    std::vector<double> angles;
    std::vector<double> radii(un);
    for (int attempt = 0; attempt < 200; ++attempt) {
        angles = draw_angles();
        for (double& r : radii) r = rng.uniform(0.2, 1.0);
        try {
            return geom2d::ConvexPolygon2D::validate(build(angles, radii));
        } catch (const Error&) {
            // reflex draw; retry
        }
    }
    // Plain rejection rarely lands a convex polygon once n grows; smooth the
    // radius sequence toward its circular mean, which always ends strictly
    // convex (distinct angles on a common circle).
    for (int pass = 0; pass < 500; ++pass) {
        std::vector<double> next(un);
        for (std::size_t i = 0; i < un; ++i) {
            next[i] = 0.25 * radii[(i + un - 1) % un] + 0.5 * radii[i] + 0.25 * radii[(i + 1) % un];
        }
        radii = std::move(next);
        try {
            return geom2d::ConvexPolygon2D::validate(build(angles, radii));
        } catch (const Error&) {
        }
    }
    throw std::logic_error("convex polygon sampler retry cap exhausted");
}

namespace {

// ---- nested shape search -------------------------------------------------

struct RestartOutcome {
    double value = std::numeric_limits<double>::infinity();
    long long eval_index = std::numeric_limits<long long>::max();
    nlohmann::ordered_json shape;
    std::vector<double> probe;
    bool converged = false;

    bool better_than(const RestartOutcome& other, int my_index, int other_index) const {
        if (value != other.value) return value < other.value;
        return my_index < other_index;
    }
};

template <typename Fn>
std::vector<RestartOutcome> parallel_restarts(int count, const Fn& fn) {
    const int workers = std::min(thread_cap(), count);
    std::vector<RestartOutcome> out(static_cast<std::size_t>(count));
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(i);
        return out;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                out[static_cast<std::size_t>(i)] = fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
    return out;
}

// Fixed refinement schedule: a fresh simplex at the incumbent with a smaller
// scale each round.
constexpr double kOuterSteps[] = {0.30, 0.10, 0.03};
constexpr int kScoreRestarts = 2;  // probe restarts while scoring a shape

std::vector<geom2d::Point2> normalized_points_2d(std::span<const double> coords) {
    std::vector<geom2d::Point2> pts(coords.size() / 2);
    geom2d::Point2 c{};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        pts[i] = {coords[2 * i], coords[2 * i + 1]};
        c = c + pts[i];
    }
    c = (1.0 / static_cast<double>(pts.size())) * c;
    double xmin = 1e308, xmax = -1e308, ymin = 1e308, ymax = -1e308;
    for (auto& p : pts) {
        p = p - c;
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const double diag = std::hypot(xmax - xmin, ymax - ymin);
    if (!(diag > 1e-12)) fail_validation("NotConvex", "degenerate shape scale");
    const double s = 2.0 / diag;
    for (auto& p : pts) p = s * p;
    return pts;
}

std::vector<geom3d::Point3> normalized_points_3d(std::span<const double> coords) {
    std::vector<geom3d::Point3> pts(coords.size() / 3);
    geom3d::Point3 c{};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        pts[i] = {coords[3 * i], coords[3 * i + 1], coords[3 * i + 2]};
        c = c + pts[i];
    }
    c = (1.0 / static_cast<double>(pts.size())) * c;
    geom3d::Point3 lo{1e308, 1e308, 1e308}, hi{-1e308, -1e308, -1e308};
    for (auto& p : pts) {
        p = p - c;
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    const double diag = geom3d::norm(hi - lo);
    if (!(diag > 1e-12)) fail_validation("NotConvex", "degenerate shape scale");
    const double s = 2.0 / diag;
    for (auto& p : pts) p = s * p;
    return pts;
}

ConstantEstimate finalize_estimate(std::vector<RestartOutcome> outcomes,
                                   const OptimizerConfig& cfg) {
    int best_index = -1;
    for (int i = 0; i < static_cast<int>(outcomes.size()); ++i) {
        if (best_index < 0 ||
            outcomes[static_cast<std::size_t>(i)].better_than(
                outcomes[static_cast<std::size_t>(best_index)], i, best_index)) {
            best_index = i;
        }
    }
    const RestartOutcome& best = outcomes[static_cast<std::size_t>(best_index)];
    if (!(best.value < kRejected)) {
        fail_validation("BudgetTooSmall", "no valid shape was sampled within the budget");
    }
    ConstantEstimate est;
    est.min_ratio = best.value;
    est.shape = best.shape;
    est.probe = best.probe;
    est.seed = cfg.seed;
    est.restarts_used = cfg.restarts;
    for (const RestartOutcome& o : outcomes) est.converged = est.converged || o.converged;
    return est;
}

}  // namespace

nlohmann::ordered_json ConstantEstimate::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["record_type"] = "estimate";
    j["family"] = family;
    j["n"] = n;
    j["angle_deg"] = angle_deg;
    j["target"] = target;
    j["min_ratio"] = min_ratio;
    j["shape"] = shape;
    j["probe"] = probe;
    j["seed"] = seed;
    j["restarts"] = restarts_used;
    j["converged"] = converged;
    j["floor"] = std::isnan(floor) ? nlohmann::ordered_json() : nlohmann::ordered_json(floor);
    j["counterexample"] = counterexample;
    return j;
}

ConstantEstimate estimate_constant_2d(int n, double angle_deg, const OptimizerConfig& cfg) {
    cfg.validate();
    if (n < 3) fail_validation("TooFewVertices", "n must be >= 3");
    if (!(angle_deg > 0.0 && angle_deg < 180.0)) {
        fail_validation("DegenerateAngle", "angle must lie strictly between 0 and 180 degrees");
    }

    auto run_restart = [&](int r) -> RestartOutcome {
        SplitMix64 rng(derive_stream(cfg.seed, static_cast<std::uint64_t>(r)));
        const std::vector<geom2d::Point2> start_pts =
            r == 0 ? geom2d::regular_polygon(n).vertices()
                   : sample_convex_polygon(n, rng).vertices();

        OptimizerConfig score_cfg = cfg;
        score_cfg.restarts = kScoreRestarts;
        score_cfg.seed = derive_stream(cfg.seed ^ 0xabcdef0123456789ULL,
                                       static_cast<std::uint64_t>(r));

        RestartOutcome best;
        long long eval_counter = 0;
        auto score = [&](std::span<const double> coords) -> double {
            const long long eval_index = eval_counter++;
            try {
                auto pts = normalized_points_2d(coords);
                auto poly = geom2d::ConvexPolygon2D::validate(std::move(pts));
                const ProbeResult pr = inner_min_probe(poly, angle_deg, score_cfg);
                if (pr.min_ratio < best.value) {
                    best.value = pr.min_ratio;
                    best.eval_index = eval_index;
                    best.shape = geom2d::polygon_to_json(poly);
                    best.probe = pr.probe;
                }
                return pr.min_ratio;
            } catch (const Error&) {
                return kRejected;
            }
        };

        std::vector<double> x;
        x.reserve(2 * start_pts.size());
        for (const auto& p : start_pts) {
            x.push_back(p.x);
            x.push_back(p.y);
        }
        for (double step : kOuterSteps) {
            const NelderMeadResult res = nelder_mead(score, x, step, cfg.outer_iterations,
                                                     cfg.simplex_tolerance, cfg.shrink_floor);
            x = res.argmin;
            best.converged = best.converged || res.converged;
        }
        return best;
    };

    ConstantEstimate est = finalize_estimate(parallel_restarts(cfg.restarts, run_restart), cfg);
    est.n = n;
    est.family = "polygon";
    est.angle_deg = angle_deg;
    est.target = "sides";
    est.floor = geom2d::conjectured_floor(n, angle_deg);
    est.counterexample = est.min_ratio < est.floor - kFloorTolerance;
    return est;
}

ConstantEstimate estimate_constant_3d(ShapeFamily3D family, geom3d::PedalTarget target,
                                      const OptimizerConfig& cfg,
                                      const geom3d::Polyhedron3D* user_mesh) {
    cfg.validate();

    if (family == ShapeFamily3D::UserMesh) {
        if (user_mesh == nullptr) {
            fail_validation("BadConfig", "user_mesh family requires a polyhedron");
        }
        const ProbeResult pr = inner_min_probe(*user_mesh, target, cfg);
        ConstantEstimate est;
        est.n = static_cast<int>(user_mesh->vertices().size());
        est.family = "user_mesh";
        est.angle_deg = 90.0;
        est.target = geom3d::to_string(target);
        est.min_ratio = pr.min_ratio;
        est.shape = geom3d::polyhedron_to_json(*user_mesh);
        est.probe = pr.probe;
        est.seed = cfg.seed;
        est.restarts_used = cfg.restarts;
        est.converged = pr.converged;
        est.floor = std::numeric_limits<double>::quiet_NaN();
        est.counterexample = false;
        return est;
    }

    auto sample_tetra_points = [](SplitMix64& rng) {
        for (int attempt = 0; attempt < 10000; ++attempt) {
            geom3d::Point3 p[4];
            for (auto& q : p) {
                q = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
            }
            const geom3d::Point3 u = p[1] - p[0], v = p[2] - p[0], w = p[3] - p[0];
            const double vol = std::abs(dot(u, cross(v, w))) / 6.0;
            if (vol < 0.05) continue;
            try {
                geom3d::tetrahedron_from_points(p[0], p[1], p[2], p[3]);
                return std::vector<geom3d::Point3>{p[0], p[1], p[2], p[3]};
            } catch (const Error&) {
            }
        }
        throw std::logic_error("tetrahedron sampler retry cap exhausted");
    };

    auto run_restart = [&](int r) -> RestartOutcome {
        SplitMix64 rng(derive_stream(cfg.seed, static_cast<std::uint64_t>(r)));
        const std::vector<geom3d::Point3> start_pts =
            r == 0 ? geom3d::regular_tetrahedron(1.0).vertices() : sample_tetra_points(rng);

        OptimizerConfig score_cfg = cfg;
        score_cfg.restarts = kScoreRestarts;
        score_cfg.seed = derive_stream(cfg.seed ^ 0xabcdef0123456789ULL,
                                       static_cast<std::uint64_t>(r));

        RestartOutcome best;
        long long eval_counter = 0;
        auto score = [&](std::span<const double> coords) -> double {
            const long long eval_index = eval_counter++;
            try {
                auto pts = normalized_points_3d(coords);
                auto tetra = geom3d::tetrahedron_from_points(pts[0], pts[1], pts[2], pts[3]);
                const ProbeResult pr = inner_min_probe(tetra, target, score_cfg);
                if (pr.min_ratio < best.value) {
                    best.value = pr.min_ratio;
                    best.eval_index = eval_index;
                    best.shape = geom3d::polyhedron_to_json(tetra);
                    best.probe = pr.probe;
                }
                return pr.min_ratio;
            } catch (const Error&) {
                return kRejected;
            }
        };

        std::vector<double> x;
        x.reserve(12);
        for (const auto& p : start_pts) {
            x.push_back(p.x);
            x.push_back(p.y);
            x.push_back(p.z);
        }
        for (double step : kOuterSteps) {
            const NelderMeadResult res = nelder_mead(score, x, step, cfg.outer_iterations,
                                                     cfg.simplex_tolerance, cfg.shrink_floor);
            x = res.argmin;
            best.converged = best.converged || res.converged;
        }
        return best;
    };

    ConstantEstimate est = finalize_estimate(parallel_restarts(cfg.restarts, run_restart), cfg);
    est.n = 4;
    est.family = "tetrahedron";
    est.angle_deg = 90.0;
    est.target = geom3d::to_string(target);
    if (target == geom3d::PedalTarget::Faces) {
        est.floor = geom3d::kTetrahedronFaceFloor;
        est.counterexample = est.min_ratio < est.floor - kFloorTolerance;
    } else {
        est.floor = std::numeric_limits<double>::quiet_NaN();
        est.counterexample = false;
    }
    return est;
}

}  // namespace conjlab::opt
