#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "conjlab/geom2d.hpp"
#include "conjlab/geom3d.hpp"
#include "conjlab/rng.hpp"

namespace conjlab::opt {

struct OptimizerConfig {
    std::uint64_t seed = 42;
    int restarts = 16;
    int inner_iterations = 250;   // probe-search simplex budget
    int outer_iterations = 400;   // shape-search simplex budget per refinement round
    double simplex_tolerance = 1e-10;
    double shrink_floor = 1e-13;  // minimum simplex scale before giving up

    void validate() const;
};

struct NelderMeadResult {
    std::vector<double> argmin;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;  // stopped on simplex diameter, not budget
};

using Objective = std::function<double(std::span<const double>)>;

// Downhill simplex with dimension-adaptive coefficients. Non-finite
// objective values are treated as +infinity after the start point; a
// non-finite value at the start itself throws ObjectiveNotFinite.
// cfg.inner_iterations bounds the iteration count.
NelderMeadResult nelder_mead(const Objective& f, std::span<const double> start,
                             const OptimizerConfig& cfg);
NelderMeadResult nelder_mead(const Objective& f, std::span<const double> start,
                             double initial_step, int max_iterations, double tolerance,
                             double shrink_floor);

struct ProbeResult {
    std::vector<double> probe;  // 2 or 3 coordinates
    double min_ratio = 0.0;
    long long evaluations = 0;
    bool converged = false;
};

// Minimizes the pedal ratio over interior probe points. Probes are
// parameterized as softmax-normalized convex weights over the shape's
// vertices, so every candidate is strictly interior by construction; the
// best value over cfg.restarts seeded simplex starts is returned.
ProbeResult inner_min_probe(const geom2d::ConvexPolygon2D& poly, double angle_deg,
                            const OptimizerConfig& cfg);
ProbeResult inner_min_probe(const geom3d::Polyhedron3D& poly, geom3d::PedalTarget target,
                            const OptimizerConfig& cfg);

// Random strictly convex n-gon: sorted random angles, radii in [0.2, 1].
// Rejection-sampled; if a radius draw refuses to be convex (likely for
// large n) the radii are smoothed toward their circular mean until the
// polygon validates. Deterministic given the generator state.
geom2d::ConvexPolygon2D sample_convex_polygon(int n, SplitMix64& rng);

struct ConstantEstimate {
    int n = 0;                 // vertex count of the argmin shape
    std::string family;        // "polygon" | "tetrahedron" | "user_mesh"
    double angle_deg = 90.0;   // 90 for 3D targets
    std::string target;        // "sides" | "faces" | "edges"
    double min_ratio = 0.0;
    nlohmann::ordered_json shape;  // argmin shape in the module file format
    std::vector<double> probe;     // argmin probe coordinates
    std::uint64_t seed = 0;
    int restarts_used = 0;
    bool converged = false;
    double floor = 0.0;        // conjectured floor, NaN when none is known
    bool counterexample = false;

    nlohmann::ordered_json to_json() const;
};

// Estimates the best-possible polygon constant for the given n and angle by
// nested minimization: an outer simplex search over vertex coordinates
// (restart 0 starts from the regular n-gon, the rest from random samples)
// scored by inner_min_probe. The reported value is the minimum over every
// evaluation made. Deterministic for a fixed cfg.seed; restarts may run in
// parallel (bounded by CONJLAB_THREADS).
ConstantEstimate estimate_constant_2d(int n, double angle_deg, const OptimizerConfig& cfg);

enum class ShapeFamily3D { Tetrahedron, UserMesh };

// Same nested search over tetrahedron shapes, or probe-only minimization of
// a fixed user mesh.
ConstantEstimate estimate_constant_3d(ShapeFamily3D family, geom3d::PedalTarget target,
                                      const OptimizerConfig& cfg,
                                      const geom3d::Polyhedron3D* user_mesh = nullptr);

// Worker cap: CONJLAB_THREADS, defaulting to the machine's parallelism.
int thread_cap();

// Counterexample margin on the conjectured floors.
inline constexpr double kFloorTolerance = 1e-3;

}  // namespace conjlab::opt
