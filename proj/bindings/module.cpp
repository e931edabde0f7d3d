#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <utility>
#include <vector>

#include "conjlab/fermat.hpp"
#include "conjlab/geom2d.hpp"
#include "conjlab/geom3d.hpp"
#include "conjlab/jsontext.hpp"
#include "conjlab/optimizer.hpp"
#include "conjlab/rng.hpp"

namespace py = pybind11;
using namespace conjlab;

namespace {

using XY = std::pair<double, double>;
using XYZ = std::tuple<double, double, double>;

geom2d::Point2 to_point2(const XY& p) { return {p.first, p.second}; }
geom3d::Point3 to_point3(const XYZ& p) { return {std::get<0>(p), std::get<1>(p), std::get<2>(p)}; }
XY from_point2(geom2d::Point2 p) { return {p.x, p.y}; }
XYZ from_point3(geom3d::Point3 p) { return {p.x, p.y, p.z}; }

py::object json_to_py(const nlohmann::ordered_json& j) {
    return py::module_::import("json").attr("loads")(jsontext::dump(j));
}

opt::OptimizerConfig make_config(std::uint64_t seed, int restarts, int inner_iterations,
                                 int outer_iterations) {
    opt::OptimizerConfig cfg;
    cfg.seed = seed;
    cfg.restarts = restarts;
    cfg.inner_iterations = inner_iterations;
    cfg.outer_iterations = outer_iterations;
    return cfg;
}

fermat::PrimalityPolicy make_policy(std::uint64_t trial_bound, int mr_rounds,
                                    std::uint64_t max_bits) {
    fermat::PrimalityPolicy p;
    p.trial_bound = trial_bound;
    p.mr_rounds = mr_rounds;
    p.max_bits = max_bits;
    return p;
}

geom3d::PedalTarget parse_target(const std::string& target) {
    if (target == "faces") return geom3d::PedalTarget::Faces;
    if (target == "edges") return geom3d::PedalTarget::Edges;
    throw py::value_error("target must be 'faces' or 'edges'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Pedal-ratio geometry and generalized Fermat prime search";

    py::register_exception<Error>(m, "ConjlabError");

    // ---- planar geometry ---------------------------------------------------
    py::class_<geom2d::ConvexPolygon2D>(m, "ConvexPolygon2D")
        .def_property_readonly("vertices",
                               [](const geom2d::ConvexPolygon2D& p) {
                                   std::vector<XY> out;
                                   for (auto v : p.vertices()) out.push_back(from_point2(v));
                                   return out;
                               })
        .def_property_readonly("n", &geom2d::ConvexPolygon2D::size);

    py::class_<geom2d::RatioReport>(m, "RatioReport")
        .def_readonly("sum_vertex", &geom2d::RatioReport::sum_vertex)
        .def_readonly("sum_pedal", &geom2d::RatioReport::sum_pedal)
        .def_readonly("ratio", &geom2d::RatioReport::ratio)
        .def_readonly("angle_deg", &geom2d::RatioReport::angle_deg);

    m.def("validate_polygon", [](const std::vector<XY>& pts) {
        std::vector<geom2d::Point2> v;
        v.reserve(pts.size());
        for (const auto& p : pts) v.push_back(to_point2(p));
        return geom2d::ConvexPolygon2D::validate(std::move(v));
    });
    m.def("regular_polygon", &geom2d::regular_polygon, py::arg("n"));
    m.def("contains_interior", [](const geom2d::ConvexPolygon2D& poly, const XY& m) {
        return geom2d::contains_interior(poly, to_point2(m));
    });
    m.def("vertex_distances", [](const geom2d::ConvexPolygon2D& poly, const XY& m) {
        return geom2d::vertex_distances(poly, to_point2(m));
    });
    m.def(
        "perpendicular_pedal",
        [](const geom2d::ConvexPolygon2D& poly, const XY& m) {
            std::vector<py::dict> out;
            for (const auto& e : geom2d::perpendicular_pedal(poly, to_point2(m)).entries) {
                py::dict d;
                d["side"] = e.side_index;
                d["foot"] = from_point2(e.foot);
                d["distance"] = e.distance;
                d["segment_t"] = e.segment_t;
                d["inside_segment"] = e.inside_segment;
                out.push_back(d);
            }
            return out;
        });
    m.def(
        "oblique_pedal",
        [](const geom2d::ConvexPolygon2D& poly, const XY& m, double angle_deg) {
            std::vector<py::dict> out;
            for (const auto& e : geom2d::oblique_pedal(poly, to_point2(m), angle_deg).entries) {
                py::dict d;
                d["side"] = e.side_index;
                d["foot"] = from_point2(e.foot);
                d["distance"] = e.distance;
                d["segment_t"] = e.segment_t;
                d["inside_segment"] = e.inside_segment;
                out.push_back(d);
            }
            return out;
        },
        py::arg("polygon"), py::arg("point"), py::arg("angle_deg"));
    m.def(
        "em_ratio",
        [](const geom2d::ConvexPolygon2D& poly, const XY& m, double angle_deg) {
            return geom2d::em_ratio(poly, to_point2(m), angle_deg);
        },
        py::arg("polygon"), py::arg("point"), py::arg("angle_deg") = 90.0);

    // ---- spatial geometry ----------------------------------------------------
    py::class_<geom3d::Polyhedron3D>(m, "Polyhedron3D")
        .def_property_readonly("vertices",
                               [](const geom3d::Polyhedron3D& p) {
                                   std::vector<XYZ> out;
                                   for (auto v : p.vertices()) out.push_back(from_point3(v));
                                   return out;
                               })
        .def_property_readonly("faces",
                               [](const geom3d::Polyhedron3D& p) { return p.faces(); })
        .def_property_readonly("edges", [](const geom3d::Polyhedron3D& p) { return p.edges(); });

    py::class_<geom3d::RatioReport3>(m, "RatioReport3")
        .def_readonly("sum_vertex", &geom3d::RatioReport3::sum_vertex)
        .def_readonly("sum_pedal", &geom3d::RatioReport3::sum_pedal)
        .def_readonly("ratio", &geom3d::RatioReport3::ratio);

    m.def("validate_polyhedron",
          [](const std::vector<XYZ>& verts, const std::vector<std::vector<int>>& faces) {
              std::vector<geom3d::Point3> v;
              v.reserve(verts.size());
              for (const auto& p : verts) v.push_back(to_point3(p));
              return geom3d::Polyhedron3D::validate(std::move(v), faces);
          });
    m.def("regular_tetrahedron", &geom3d::regular_tetrahedron, py::arg("circumradius") = 1.0);
    m.def("cube", &geom3d::cube, py::arg("half_extent") = 1.0);
    m.def("contains_interior_3d", [](const geom3d::Polyhedron3D& p, const XYZ& m) {
        return geom3d::contains_interior(p, to_point3(m));
    });
    m.def("face_pedal", [](const geom3d::Polyhedron3D& p, const XYZ& m) {
        std::vector<py::dict> out;
        for (const auto& e : geom3d::face_pedal(p, to_point3(m))) {
            py::dict d;
            d["face"] = e.face_index;
            d["foot"] = from_point3(e.foot);
            d["distance"] = e.distance;
            d["inside_face"] = e.inside_face;
            out.push_back(d);
        }
        return out;
    });
    m.def("edge_pedal", [](const geom3d::Polyhedron3D& p, const XYZ& m) {
        std::vector<py::dict> out;
        for (const auto& e : geom3d::edge_pedal(p, to_point3(m))) {
            py::dict d;
            d["edge"] = e.edge;
            d["foot"] = from_point3(e.foot);
            d["distance"] = e.distance;
            out.push_back(d);
        }
        return out;
    });
    m.def(
        "em_ratio_3d",
        [](const geom3d::Polyhedron3D& p, const XYZ& m, const std::string& target) {
            return geom3d::em_ratio(p, to_point3(m), parse_target(target));
        },
        py::arg("polyhedron"), py::arg("point"), py::arg("target"));

    // ---- optimizer -----------------------------------------------------------
    py::class_<opt::ConstantEstimate>(m, "ConstantEstimate")
        .def_readonly("n", &opt::ConstantEstimate::n)
        .def_readonly("family", &opt::ConstantEstimate::family)
        .def_readonly("angle_deg", &opt::ConstantEstimate::angle_deg)
        .def_readonly("target", &opt::ConstantEstimate::target)
        .def_readonly("min_ratio", &opt::ConstantEstimate::min_ratio)
        .def_readonly("probe", &opt::ConstantEstimate::probe)
        .def_readonly("seed", &opt::ConstantEstimate::seed)
        .def_readonly("restarts", &opt::ConstantEstimate::restarts_used)
        .def_readonly("converged", &opt::ConstantEstimate::converged)
        .def_readonly("floor", &opt::ConstantEstimate::floor)
        .def_readonly("counterexample", &opt::ConstantEstimate::counterexample)
        .def("to_dict",
             [](const opt::ConstantEstimate& e) { return json_to_py(e.to_json()); });

    m.def(
        "sample_convex_polygon",
        [](int n, std::uint64_t seed) {
            SplitMix64 rng(seed);
            return opt::sample_convex_polygon(n, rng);
        },
        py::arg("n"), py::arg("seed"));
    m.def(
        "estimate_constant_2d",
        [](int n, double angle_deg, std::uint64_t seed, int restarts, int inner_iterations,
           int outer_iterations) {
            return opt::estimate_constant_2d(
                n, angle_deg, make_config(seed, restarts, inner_iterations, outer_iterations));
        },
        py::arg("n"), py::arg("angle_deg") = 90.0, py::arg("seed") = 42, py::arg("restarts") = 16,
        py::arg("inner_iterations") = 250, py::arg("outer_iterations") = 400,
        py::call_guard<py::gil_scoped_release>());
    m.def(
        "estimate_constant_3d",
        [](const std::string& target, std::uint64_t seed, int restarts, int inner_iterations,
           int outer_iterations) {
            return opt::estimate_constant_3d(
                opt::ShapeFamily3D::Tetrahedron, parse_target(target),
                make_config(seed, restarts, inner_iterations, outer_iterations));
        },
        py::arg("target"), py::arg("seed") = 42, py::arg("restarts") = 16,
        py::arg("inner_iterations") = 250, py::arg("outer_iterations") = 400,
        py::call_guard<py::gil_scoped_release>());
    m.def(
        "min_ratio_over_probes",
        [](const geom3d::Polyhedron3D& mesh, const std::string& target, std::uint64_t seed,
           int restarts, int inner_iterations) {
            const auto est = opt::estimate_constant_3d(
                opt::ShapeFamily3D::UserMesh, parse_target(target),
                make_config(seed, restarts, inner_iterations, 1), &mesh);
            return json_to_py(est.to_json());
        },
        py::arg("mesh"), py::arg("target"), py::arg("seed") = 42, py::arg("restarts") = 8,
        py::arg("inner_iterations") = 250);

    // ---- fermat ---------------------------------------------------------------
    m.def("validate_triplet", [](long long a, long long b, long long c) {
        fermat::Triplet::validate(a, b, c);
        return true;
    });
    m.def(
        "tower_value",
        [](long long a, long long b, long long c, int k, std::uint64_t max_bits) -> py::object {
            const auto t = fermat::Triplet::validate(a, b, c);
            const auto out = fermat::tower_value(t, k, max_bits);
            py::dict d;
            d["predicted_bits"] = out.predicted_bits;
            d["skipped"] = !out.value.has_value();
            if (out.value) {
                d["bit_length"] = out.value->bit_length;
                d["value"] = py::module_::import("builtins").attr("int")(out.value->value.str());
            }
            return d;
        },
        py::arg("a"), py::arg("b"), py::arg("c"), py::arg("k"), py::arg("max_bits") = 65536);
    m.def(
        "fermat_test",
        [](long long a, long long b, long long c, int k, std::uint64_t trial_bound, int mr_rounds,
           std::uint64_t max_bits) {
            const auto t = fermat::Triplet::validate(a, b, c);
            const auto entry = fermat::evaluate_k(t, k, make_policy(trial_bound, mr_rounds, max_bits));
            py::dict d;
            d["k"] = entry.k;
            d["predicted_bits"] = entry.predicted_bits;
            d["status"] = fermat::to_string(entry.verdict.status);
            d["rounds"] = entry.verdict.rounds;
            if (entry.verdict.factor) d["factor"] = *entry.verdict.factor;
            if (entry.verdict.witness) d["witness"] = *entry.verdict.witness;
            if (entry.verdict.skip_reason) d["skip_reason"] = *entry.verdict.skip_reason;
            if (entry.verdict.filter) d["filter"] = *entry.verdict.filter;
            return d;
        },
        py::arg("a"), py::arg("b"), py::arg("c"), py::arg("k"), py::arg("trial_bound") = 100000,
        py::arg("mr_rounds") = 24, py::arg("max_bits") = 65536);

    auto search_fn = [](long long a, long long b, long long c, int kmax, std::uint64_t trial_bound,
                        int mr_rounds, std::uint64_t max_bits) {
        const auto t = fermat::Triplet::validate(a, b, c);
        const auto rec = fermat::scan_triplet(t, kmax, make_policy(trial_bound, mr_rounds, max_bits));
        return json_to_py(rec.to_json(false));
    };
    m.def("fermat_search", search_fn, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("kmax"),
          py::arg("trial_bound") = 100000, py::arg("mr_rounds") = 24, py::arg("max_bits") = 65536);
    m.def("find_k0", search_fn, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("kmax"),
          py::arg("trial_bound") = 100000, py::arg("mr_rounds") = 24, py::arg("max_bits") = 65536);
    m.def("prime_streak", search_fn, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("kmax"),
          py::arg("trial_bound") = 100000, py::arg("mr_rounds") = 24, py::arg("max_bits") = 65536);
    m.def("prime_positions", search_fn, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("kmax"),
          py::arg("trial_bound") = 100000, py::arg("mr_rounds") = 24, py::arg("max_bits") = 65536);

    m.attr("__version__") = "0.1.0";
}
