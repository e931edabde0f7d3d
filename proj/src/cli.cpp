#include "conjlab/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "conjlab/error.hpp"
#include "conjlab/fermat.hpp"
#include "conjlab/geom2d.hpp"
#include "conjlab/geom3d.hpp"
#include "conjlab/jsontext.hpp"
#include "conjlab/optimizer.hpp"
#include "conjlab/store.hpp"

namespace conjlab::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kSchemaVersion = 1;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Usage: return 2;
        case ErrorKind::Validation: return 3;
        case ErrorKind::Io: return 4;
    }
    return 1;
}

double parse_double_strict(const std::string& s, const char* what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        fail_usage("BadArgument", std::string(what) + ": cannot parse \"" + s + "\"");
    }
    if (used != s.size()) {
        fail_usage("BadArgument", std::string(what) + ": trailing characters in \"" + s + "\"");
    }
    return v;
}

geom2d::Point2 parse_point2(const std::string& s) {
    const std::size_t comma = s.find(',');
    if (comma == std::string::npos || s.find(',', comma + 1) != std::string::npos) {
        fail_usage("BadArgument", "point must be \"x,y\", got \"" + s + "\"");
    }
    return {parse_double_strict(s.substr(0, comma), "point x"),
            parse_double_strict(s.substr(comma + 1), "point y")};
}

geom3d::Point3 parse_point3(const std::string& s) {
    const std::size_t c1 = s.find(',');
    const std::size_t c2 = c1 == std::string::npos ? std::string::npos : s.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos ||
        s.find(',', c2 + 1) != std::string::npos) {
        fail_usage("BadArgument", "point must be \"x,y,z\", got \"" + s + "\"");
    }
    return {parse_double_strict(s.substr(0, c1), "point x"),
            parse_double_strict(s.substr(c1 + 1, c2 - c1 - 1), "point y"),
            parse_double_strict(s.substr(c2 + 1), "point z")};
}

fermat::SweepRange parse_range(const std::string& s, const char* what) {
    const std::size_t dots = s.find("..");
    if (dots == std::string::npos) {
        fail_usage("BadArgument", std::string(what) + ": range must be \"LO..HI\", got \"" + s + "\"");
    }
    try {
        std::size_t used = 0;
        const std::string lo_str = s.substr(0, dots);
        const std::string hi_str = s.substr(dots + 2);
        const long long lo = std::stoll(lo_str, &used);
        if (used != lo_str.size()) throw std::invalid_argument(lo_str);
        const long long hi = std::stoll(hi_str, &used);
        if (used != hi_str.size()) throw std::invalid_argument(hi_str);
        return {lo, hi};
    } catch (const std::exception&) {
        fail_usage("BadArgument", std::string(what) + ": cannot parse range \"" + s + "\"");
    }
}

nlohmann::json load_json_file(const std::string& path, const char* code) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("IoFailure", "cannot read " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) fail_validation(code, path + " is not valid JSON");
    return j;
}

void print_record(std::ostream& out, const nlohmann::ordered_json& record) {
    out << jsontext::dump(record) << "\n";
}

nlohmann::ordered_json point_json(geom2d::Point2 p) {
    return nlohmann::ordered_json::array({p.x, p.y});
}

nlohmann::ordered_json point_json(geom3d::Point3 p) {
    return nlohmann::ordered_json::array({p.x, p.y, p.z});
}

struct PolicyFlags {
    std::uint64_t trial_bound = fermat::PrimalityPolicy{}.trial_bound;
    int mr_rounds = fermat::PrimalityPolicy{}.mr_rounds;
    std::uint64_t max_bits = fermat::PrimalityPolicy{}.max_bits;

    void attach(CLI::App* cmd) {
        cmd->add_option("--trial-bound", trial_bound, "trial-division prime bound");
        cmd->add_option("--mr-rounds", mr_rounds, "extra Miller-Rabin rounds above the deterministic range");
        cmd->add_option("--max-bits", max_bits, "skip values whose predicted size exceeds this many bits");
    }

    fermat::PrimalityPolicy to_policy() const {
        fermat::PrimalityPolicy p;
        p.trial_bound = trial_bound;
        p.mr_rounds = mr_rounds;
        p.max_bits = max_bits;
        p.validate();
        return p;
    }
};

struct EstimateFlags {
    std::uint64_t seed = opt::OptimizerConfig{}.seed;
    int restarts = opt::OptimizerConfig{}.restarts;
    int inner_iters = opt::OptimizerConfig{}.inner_iterations;
    int outer_iters = opt::OptimizerConfig{}.outer_iterations;

    void attach(CLI::App* cmd) {
        cmd->add_option("--seed", seed, "deterministic search seed");
        cmd->add_option("--restarts", restarts, "independent restarts");
        cmd->add_option("--inner-iters", inner_iters, "probe-search simplex iterations");
        cmd->add_option("--outer-iters", outer_iters, "shape-search simplex iterations per round");
    }

    opt::OptimizerConfig to_config() const {
        opt::OptimizerConfig cfg;
        cfg.seed = seed;
        cfg.restarts = restarts;
        cfg.inner_iterations = inner_iters;
        cfg.outer_iterations = outer_iters;
        cfg.validate();
        return cfg;
    }
};

void write_out_record(const std::string& out_path, const nlohmann::ordered_json& record) {
    store::RecordFile file = store::RecordFile::open(out_path, kSchemaVersion);
    file.append(record);
}

nlohmann::ordered_json ratio2d_record(const geom2d::ConvexPolygon2D& poly, geom2d::Point2 probe,
                                      double angle_deg) {
    const geom2d::RatioReport report = geom2d::em_ratio(poly, probe, angle_deg);
    const geom2d::PedalSet pedals = angle_deg == 90.0
                                        ? geom2d::perpendicular_pedal(poly, probe)
                                        : geom2d::oblique_pedal(poly, probe, angle_deg);
    const std::vector<double> vd = geom2d::vertex_distances(poly, probe);
    const double floor = geom2d::conjectured_floor(poly.size(), angle_deg);

    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["record_type"] = "ratio2d";
    j["n"] = poly.size();
    j["angle_deg"] = angle_deg;
    j["probe"] = point_json(probe);
    j["sum_vertex"] = report.sum_vertex;
    j["sum_pedal"] = report.sum_pedal;
    j["ratio"] = report.ratio;
    j["floor"] = floor;
    j["counterexample"] = report.ratio < floor - 1e-9;
    j["vertex_distances"] = vd;
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const auto& e : pedals.entries) {
        entries.push_back({{"side", e.side_index},
                           {"foot", point_json(e.foot)},
                           {"distance", e.distance},
                           {"segment_t", e.segment_t},
                           {"inside_segment", e.inside_segment}});
    }
    j["pedals"] = entries;
    return j;
}

nlohmann::ordered_json ratio3d_record(const geom3d::Polyhedron3D& mesh, geom3d::Point3 probe,
                                      geom3d::PedalTarget target) {
    const geom3d::RatioReport3 report = geom3d::em_ratio(mesh, probe, target);
    const bool is_tetrahedron = mesh.vertices().size() == 4 && mesh.faces().size() == 4;
    const bool has_floor = target == geom3d::PedalTarget::Faces && is_tetrahedron;
    const double floor = geom3d::kTetrahedronFaceFloor;

    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["record_type"] = "ratio3d";
    j["n"] = mesh.vertices().size();
    j["m"] = mesh.faces().size();
    j["r"] = mesh.edges().size();
    j["target"] = geom3d::to_string(target);
    j["probe"] = point_json(probe);
    j["sum_vertex"] = report.sum_vertex;
    j["sum_pedal"] = report.sum_pedal;
    j["ratio"] = report.ratio;
    j["floor"] = has_floor ? nlohmann::ordered_json(floor) : nlohmann::ordered_json();
    j["counterexample"] = has_floor && report.ratio < floor - 1e-6;
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    if (target == geom3d::PedalTarget::Faces) {
        for (const auto& e : geom3d::face_pedal(mesh, probe)) {
            entries.push_back({{"face", e.face_index},
                               {"foot", point_json(e.foot)},
                               {"distance", e.distance},
                               {"inside_face", e.inside_face}});
        }
    } else {
        for (const auto& e : geom3d::edge_pedal(mesh, probe)) {
            entries.push_back({{"edge", nlohmann::ordered_json::array({e.edge.first, e.edge.second})},
                               {"foot", point_json(e.foot)},
                               {"distance", e.distance}});
        }
    }
    j["pedals"] = entries;
    return j;
}

std::string text_summary_ratio(const nlohmann::ordered_json& j) {
    std::ostringstream os;
    os << "ratio " << jsontext::format_double(j["ratio"].get<double>()) << " = sum_vertex "
       << jsontext::format_double(j["sum_vertex"].get<double>()) << " / sum_pedal "
       << jsontext::format_double(j["sum_pedal"].get<double>());
    if (!j["floor"].is_null()) {
        os << " (conjectured floor " << jsontext::format_double(j["floor"].get<double>()) << ")";
    }
    os << "\n";
    return os.str();
}

std::string text_summary_estimate(const opt::ConstantEstimate& est) {
    std::ostringstream os;
    os << "min_ratio " << jsontext::format_double(est.min_ratio) << " over " << est.family
       << " family, target " << est.target << ", " << est.restarts_used << " restarts";
    if (!std::isnan(est.floor)) {
        os << " (conjectured floor " << jsontext::format_double(est.floor) << ")";
    }
    os << (est.counterexample ? " COUNTEREXAMPLE\n" : "\n");
    return os.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"conjlab: numerical experiments on pedal-distance ratios and generalized Fermat primes"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_version_flag("--version", "conjlab 0.1.0");

    bool no_timestamps = false;
    app.add_flag("--no-timestamps", no_timestamps,
                 "omit timing fields so identical runs produce identical bytes");

    std::function<int()> action;

    // ---- geom ------------------------------------------------------------
    auto* geom = app.add_subcommand("geom", "planar pedal-ratio queries and constant estimation");
    geom->require_subcommand(1);

    {
        auto* cmd = geom->add_subcommand("ratio", "pedal ratio for one polygon and probe point");
        auto polygon_path = std::make_shared<std::string>();
        auto point_str = std::make_shared<std::string>();
        auto alpha = std::make_shared<double>(90.0);
        auto format = std::make_shared<std::string>("json");
        cmd->add_option("--polygon", *polygon_path, "polygon JSON file")->required();
        cmd->add_option("--point", *point_str, "probe point \"x,y\"")->required();
        cmd->add_option("--alpha", *alpha, "pedal angle in degrees");
        cmd->add_option("--format", *format, "output format")
            ->check(CLI::IsMember({"json", "text"}));
        cmd->callback([&action, polygon_path, point_str, alpha, format, &out]() {
            action = [=, &out]() {
                const auto poly = geom2d::polygon_from_json(
                    load_json_file(*polygon_path, "BadPolygonFile"));
                const auto record = ratio2d_record(poly, parse_point2(*point_str), *alpha);
                if (*format == "text") {
                    out << text_summary_ratio(record);
                } else {
                    print_record(out, record);
                }
                return record["counterexample"].get<bool>() ? kExitCounterexample : 0;
            };
        });
    }

    {
        auto* cmd = geom->add_subcommand("estimate", "estimate the best-possible polygon constant");
        auto n = std::make_shared<int>(3);
        auto alpha = std::make_shared<double>(90.0);
        auto flags = std::make_shared<EstimateFlags>();
        auto out_path = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("json");
        cmd->add_option("--n", *n, "polygon vertex count")->required();
        cmd->add_option("--alpha", *alpha, "pedal angle in degrees");
        flags->attach(cmd);
        cmd->add_option("--out", *out_path, "append the estimate record to this JSONL file");
        cmd->add_option("--format", *format, "output format")
            ->check(CLI::IsMember({"json", "text"}));
        cmd->callback([&action, n, alpha, flags, out_path, format, &out]() {
            action = [=, &out]() {
                const auto est = opt::estimate_constant_2d(*n, *alpha, flags->to_config());
                const auto record = est.to_json();
                if (*format == "text") {
                    out << text_summary_estimate(est);
                } else {
                    print_record(out, record);
                }
                if (!out_path->empty()) write_out_record(*out_path, record);
                return est.counterexample ? kExitCounterexample : 0;
            };
        });
    }

    // ---- geom3 -----------------------------------------------------------
    auto* geom3 = app.add_subcommand("geom3", "spatial pedal-ratio queries and constant estimation");
    geom3->require_subcommand(1);

    {
        auto* cmd = geom3->add_subcommand("ratio", "pedal ratio for one polyhedron and probe point");
        auto fixture = std::make_shared<std::string>();
        auto mesh_path = std::make_shared<std::string>();
        auto point_str = std::make_shared<std::string>();
        auto target_str = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("json");
        cmd->add_option("--fixture", *fixture, "built-in shape")
            ->check(CLI::IsMember({"tetra", "cube"}));
        cmd->add_option("--mesh", *mesh_path, "polyhedron JSON file");
        cmd->add_option("--point", *point_str, "probe point \"x,y,z\"")->required();
        cmd->add_option("--target", *target_str, "pedal target")
            ->required()
            ->check(CLI::IsMember({"faces", "edges"}));
        cmd->add_option("--format", *format, "output format")
            ->check(CLI::IsMember({"json", "text"}));
        cmd->callback([&action, fixture, mesh_path, point_str, target_str, format, &out]() {
            action = [=, &out]() {
                if (fixture->empty() == mesh_path->empty()) {
                    fail_usage("BadArgument", "give exactly one of --fixture or --mesh");
                }
                const geom3d::Polyhedron3D mesh =
                    !fixture->empty()
                        ? (*fixture == "tetra" ? geom3d::regular_tetrahedron(1.0) : geom3d::cube(1.0))
                        : geom3d::polyhedron_from_json(load_json_file(*mesh_path, "BadMeshFile"));
                const auto target = *target_str == "faces" ? geom3d::PedalTarget::Faces
                                                           : geom3d::PedalTarget::Edges;
                const auto record = ratio3d_record(mesh, parse_point3(*point_str), target);
                if (*format == "text") {
                    out << text_summary_ratio(record);
                } else {
                    print_record(out, record);
                }
                return record["counterexample"].get<bool>() ? kExitCounterexample : 0;
            };
        });
    }

    {
        auto* cmd = geom3->add_subcommand("estimate", "estimate the best-possible polyhedron constant");
        auto family = std::make_shared<std::string>("tetrahedron");
        auto target_str = std::make_shared<std::string>();
        auto flags = std::make_shared<EstimateFlags>();
        auto out_path = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("json");
        cmd->add_option("--family", *family, "shape family to search")
            ->check(CLI::IsMember({"tetrahedron"}));
        cmd->add_option("--target", *target_str, "pedal target")
            ->required()
            ->check(CLI::IsMember({"faces", "edges"}));
        flags->attach(cmd);
        cmd->add_option("--out", *out_path, "append the estimate record to this JSONL file");
        cmd->add_option("--format", *format, "output format")
            ->check(CLI::IsMember({"json", "text"}));
        cmd->callback([&action, family, target_str, flags, out_path, format, &out]() {
            action = [=, &out]() {
                const auto target = *target_str == "faces" ? geom3d::PedalTarget::Faces
                                                           : geom3d::PedalTarget::Edges;
                const auto est = opt::estimate_constant_3d(opt::ShapeFamily3D::Tetrahedron, target,
                                                           flags->to_config());
                const auto record = est.to_json();
                if (*format == "text") {
                    out << text_summary_estimate(est);
                } else {
                    print_record(out, record);
                }
                if (!out_path->empty()) write_out_record(*out_path, record);
                return est.counterexample ? kExitCounterexample : 0;
            };
        });
    }

    // ---- fermat ----------------------------------------------------------
    auto* fer = app.add_subcommand("fermat", "generalized Fermat prime searches");
    fer->require_subcommand(1);

    {
        auto* cmd = fer->add_subcommand("test", "evaluate and classify P(k) for a single k");
        auto a = std::make_shared<long long>();
        auto b = std::make_shared<long long>();
        auto c = std::make_shared<long long>();
        auto k = std::make_shared<int>();
        auto policy = std::make_shared<PolicyFlags>();
        auto format = std::make_shared<std::string>("json");
        cmd->add_option("--a", *a, "base a")->required();
        cmd->add_option("--b", *b, "exponent base b")->required();
        cmd->add_option("--c", *c, "offset c")->required();
        cmd->add_option("--k", *k, "tower index k")->required();
        policy->attach(cmd);
        cmd->add_option("--format", *format, "output format")
            ->check(CLI::IsMember({"json", "text"}));
        cmd->callback([&action, a, b, c, k, policy, format, &out]() {
            action = [=, &out]() {
                const auto t = fermat::Triplet::validate(*a, *b, *c);
                const auto pol = policy->to_policy();
                const auto entry = fermat::evaluate_k(t, *k, pol);
                nlohmann::ordered_json j;
                j["schema_version"] = kSchemaVersion;
                j["record_type"] = "fermat_test";
                j["a"] = t.a;
                j["b"] = t.b;
                j["c"] = t.c;
                j["k"] = entry.k;
                j["predicted_bits"] = entry.predicted_bits;
                j["status"] = fermat::to_string(entry.verdict.status);
                j["rounds"] = entry.verdict.rounds;
                if (entry.verdict.factor) j["factor"] = *entry.verdict.factor;
                if (entry.verdict.witness) j["witness"] = *entry.verdict.witness;
                if (entry.verdict.skip_reason) j["skip_reason"] = *entry.verdict.skip_reason;
                if (entry.verdict.filter) j["filter"] = *entry.verdict.filter;
                if (entry.predicted_bits <= pol.max_bits) {
                    const auto tow = fermat::tower_value(t, *k, pol.max_bits);
                    j["bit_length"] = tow.value->bit_length;
                    if (tow.value->bit_length <= 256) j["value"] = tow.value->value.str();
                }
                if (*format == "text") {
                    out << "P(" << entry.k << ") of (" << t.a << "," << t.b << "," << t.c
                        << "): " << fermat::to_string(entry.verdict.status) << "\n";
                } else {
                    print_record(out, j);
                }
                return 0;
            };
        });
    }

    {
        auto* cmd = fer->add_subcommand("search", "scan k = 0..kmax for one triplet");
        auto a = std::make_shared<long long>();
        auto b = std::make_shared<long long>();
        auto c = std::make_shared<long long>();
        auto kmax = std::make_shared<int>();
        auto policy = std::make_shared<PolicyFlags>();
        auto out_path = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("json");
        cmd->add_option("--a", *a, "base a")->required();
        cmd->add_option("--b", *b, "exponent base b")->required();
        cmd->add_option("--c", *c, "offset c")->required();
        cmd->add_option("--kmax", *kmax, "scan k = 0..kmax")->required();
        policy->attach(cmd);
        cmd->add_option("--out", *out_path, "append the search record to this JSONL file");
        cmd->add_option("--format", *format, "output format")
            ->check(CLI::IsMember({"json", "text"}));
        cmd->callback([&action, a, b, c, kmax, policy, out_path, format, &out, &no_timestamps]() {
            action = [=, &out, &no_timestamps]() {
                const auto t = fermat::Triplet::validate(*a, *b, *c);
                const auto rec = fermat::scan_triplet(t, *kmax, policy->to_policy());
                const auto record = rec.to_json(!no_timestamps);
                if (*format == "text") {
                    std::ostringstream os;
                    os << "(" << t.a << "," << t.b << "," << t.c << ") k<=" << rec.k_max << ": k0=";
                    if (rec.k0) {
                        os << *rec.k0;
                    } else {
                        os << "none";
                    }
                    os << " streak=" << rec.streak_length << " primes=" << rec.prime_positions.size()
                       << " skipped=" << rec.skipped_count << "\n";
                    out << os.str();
                } else {
                    print_record(out, record);
                }
                if (!out_path->empty()) write_out_record(*out_path, record);
                return 0;
            };
        });
    }

    {
        auto* cmd = fer->add_subcommand("sweep", "scan a lexicographic grid of triplets, resumably");
        auto a_range = std::make_shared<std::string>();
        auto b_range = std::make_shared<std::string>();
        auto c_range = std::make_shared<std::string>();
        auto kmax = std::make_shared<int>();
        auto policy = std::make_shared<PolicyFlags>();
        auto out_path = std::make_shared<std::string>();
        auto resume = std::make_shared<bool>(false);
        cmd->add_option("--a", *a_range, "base range LO..HI")->required();
        cmd->add_option("--b", *b_range, "exponent-base range LO..HI")->required();
        cmd->add_option("--c", *c_range, "offset range LO..HI")->required();
        cmd->add_option("--kmax", *kmax, "scan k = 0..kmax per triplet")->required();
        policy->attach(cmd);
        cmd->add_option("--out", *out_path, "JSONL sink for search records")->required();
        cmd->add_flag("--resume", *resume, "continue from the records already in --out");
        cmd->callback([&action, a_range, b_range, c_range, kmax, policy, out_path, resume, &out,
                       &err, &no_timestamps]() {
            action = [=, &out, &err, &no_timestamps]() {
                const auto pol = policy->to_policy();
                const auto plan = fermat::sweep_plan(
                    parse_range(*a_range, "--a"), parse_range(*b_range, "--b"),
                    parse_range(*c_range, "--c"),
                    [&err](const std::string& msg) { err << msg << "\n"; });
                if (!*resume && fs::exists(*out_path)) {
                    std::error_code ec;
                    fs::remove(*out_path, ec);
                    if (ec) fail_io("IoFailure", "cannot reset " + *out_path);
                }
                store::RecordFile sink = store::RecordFile::open(*out_path, kSchemaVersion);
                std::set<std::string> done;
                for (const auto& rec : sink.records()) {
                    const auto& t = rec["triplet"];
                    done.insert(std::to_string(t["a"].get<long long>()) + "," +
                                std::to_string(t["b"].get<long long>()) + "," +
                                std::to_string(t["c"].get<long long>()));
                }
                const int emitted = fermat::sweep(
                    plan, *kmax, pol,
                    [&done](const fermat::Triplet& t) { return done.contains(t.key()); },
                    [&sink, &no_timestamps](const fermat::SearchRecord& rec) {
                        sink.append(rec.to_json(!no_timestamps));
                    });
                nlohmann::ordered_json summary;
                summary["schema_version"] = kSchemaVersion;
                summary["record_type"] = "sweep_summary";
                summary["planned"] = plan.size();
                summary["already_done"] = plan.size() - static_cast<std::size_t>(emitted);
                summary["emitted"] = emitted;
                summary["out"] = *out_path;
                print_record(out, summary);
                return 0;
            };
        });
    }

    // ---- report ------------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("report", "project stored records into a table");
        auto in_path = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("csv");
        auto columns_str = std::make_shared<std::string>();
        auto out_path = std::make_shared<std::string>();
        auto crlf = std::make_shared<bool>(false);
        cmd->add_option("--in", *in_path, "JSONL record file")->required();
        cmd->add_option("--format", *format, "output format")->check(CLI::IsMember({"csv"}));
        cmd->add_option("--columns", *columns_str, "comma-separated dotted field paths")->required();
        cmd->add_option("--out", *out_path, "write the table here instead of stdout");
        cmd->add_flag("--crlf", *crlf, "use CRLF line endings");
        cmd->callback([&action, in_path, columns_str, out_path, crlf, &out]() {
            action = [=, &out]() {
                if (!fs::exists(*in_path)) fail_io("IoFailure", *in_path + " does not exist");
                store::RecordFile file = store::RecordFile::open(*in_path, kSchemaVersion);
                std::vector<std::string> columns;
                std::stringstream ss(*columns_str);
                std::string col;
                while (std::getline(ss, col, ',')) {
                    if (!col.empty()) columns.push_back(col);
                }
                if (columns.empty()) fail_usage("BadArgument", "--columns must name at least one field");
                const std::string csv = store::export_csv(file.records(), columns, *crlf);
                if (out_path->empty()) {
                    out << csv;
                } else {
                    std::ofstream f(*out_path, std::ios::binary);
                    if (!f || !(f << csv)) fail_io("IoFailure", "cannot write " + *out_path);
                }
                return 0;
            };
        });
    }

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("conjlab");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    }

    try {
        return action ? action() : 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace conjlab::cli
