#include "anaflow/report_json.hpp"
#include "anaflow/runtime.hpp"
#include "anaflow/numfmt.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace anaflow;

namespace {

struct Knobs {
    std::string input;
    std::string out = ".";
    int order = 16;        // truncation horizon R
    double tail = 1e-9;    // target truncation tail
    double radius = 0.5;   // polydisc radius
    int grid = 33;         // box sample resolution
    int threads = 1;
    unsigned long seed = 12345;
};

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << content;
}

int fail(const Knobs& k, int code, const std::string& kind, const std::string& message) {
    Json err{{"schema", 1}, {"error", message}, {"kind", kind}};
    try {
        write_file(fs::path(k.out) / "error.json", dump_deterministic(err));
    } catch (...) {
    }
    std::cerr << "error (" << kind << "): " << message << "\n";
    return code;
}

Json read_request(const Knobs& k) {
    if (k.input.empty()) throw std::invalid_argument("--input is required for this command");
    std::ifstream is(k.input);
    if (!is) throw std::invalid_argument("cannot read input file " + k.input);
    Json j = Json::parse(is);
    if (j.value("schema", 0) != 1) throw std::invalid_argument("unsupported schema version");
    return j;
}

StepField field_from_request(const Json& req, const Knobs& k, const TimeInterval& T) {
    const Json& f = req.at("field");
    if (f.contains("breakpoints")) return stepfield_from_json(f);
    int n = f.at("n").get<int>();
    std::vector<Expression> comps;
    for (const auto& cj : f.at("components"))
        comps.push_back(parse_expression(cj.get<std::string>(), n));
    VectorField X(n, std::move(comps));
    if (X.depends_on_time()) {
        int pieces = req.value("pieces", 32);
        FreezeRule rule = req.value("rule", std::string("midpoint")) == "left"
                              ? FreezeRule::Left
                              : FreezeRule::Midpoint;
        return simple_approximate(X, T, pieces, rule);
    }
    (void)k;
    return StepField::autonomous(X, T);
}

TimeInterval interval_from_request(const Json& req) {
    const Json& iv = req.at("interval");
    return TimeInterval(iv.at(0).get<double>(), iv.at(1).get<double>());
}

CompactBox box_from_request(const Json& req, const Knobs& k) {
    CompactBox K = box_from_json(req.at("box"));
    if (!req.at("box").contains("grid")) K.grid = k.grid;
    return K;
}

WeightSequence weights_from_request(const Json& req, const Knobs& k) {
    double d = 1.0, ratio = 0.5;
    if (req.contains("weights")) {
        d = req.at("weights").value("d", 1.0);
        ratio = req.at("weights").value("ratio", 0.5);
    }
    return WeightSequence::geometric(d, ratio, k.order);
}

int cmd_flow(const Knobs& k, bool with_points) {
    Json req = read_request(k);
    TimeInterval T = interval_from_request(req);
    StepField X = field_from_request(req, k, T);
    CompactBox K = box_from_request(req, k);
    double radius = req.value("polydisc_radius", k.radius);
    Expression f = parse_expression(req.value("observable", std::string("x1")), X.dim);

    CertifyOptions opts;
    opts.target_tail = req.value("target_tail", k.tail);
    FlowCertificate cert = certify(X, T, K, Polydisc(K, radius), f, opts);
    write_file(fs::path(k.out) / "certificate.json", dump_deterministic(to_json(cert)));

    if (with_points) {
        std::vector<std::vector<double>> points;
        for (const auto& pj : req.at("points")) points.push_back(pj.get<std::vector<double>>());
        std::vector<int> ids;
        std::vector<double> ts, residuals;
        std::vector<std::vector<double>> xs;
        for (std::size_t pi = 0; pi < points.size(); ++pi) {
            std::vector<double> x = points[pi];
            double residual = 0.0;
            ids.push_back(static_cast<int>(pi));
            ts.push_back(T.t_start);
            xs.push_back(x);
            residuals.push_back(0.0);
            for (const auto& sub : cert.subintervals) {
                x = lie_step_point(X.pieces[sub.piece], x, sub.t_hi - sub.t_lo, sub.order);
                residual = residual * std::exp(sub.lipschitz * (sub.t_hi - sub.t_lo)) +
                           sub.coord_tail;
                ids.push_back(static_cast<int>(pi));
                ts.push_back(sub.t_hi);
                xs.push_back(x);
                residuals.push_back(residual);
            }
        }
        write_file(fs::path(k.out) / "trajectory.csv",
                   trajectory_csv(X.dim, ids, ts, xs, residuals));
    }
    std::cout << "certified " << cert.subintervals.size() << " subintervals, residual bound "
              << fmt17(cert.residual_bound()) << "\n";
    return 0;
}

int cmd_seminorm(const Knobs& k) {
    Json req = read_request(k);
    CompactBox K = box_from_request(req, k);
    WeightSequence a = weights_from_request(req, k);
    double t = req.value("t", 0.0);
    SeminormOptions opts;
    if (req.contains("majorant_radius"))
        opts.majorant = Polydisc(K, req.at("majorant_radius").get<double>());

    Json out;
    if (req.contains("function")) {
        Expression f = parse_expression(req.at("function").get<std::string>(), K.dim());
        out = to_json(seminorm_function(f, K, a, t, opts));
    } else if (req.contains("field")) {
        StepField X = field_from_request(req, k, TimeInterval(0.0, 1.0));
        out = to_json(seminorm_field(X.pieces.front(), K, a, t, opts));
    } else {
        throw std::invalid_argument("seminorm request needs a function or a field");
    }
    write_file(fs::path(k.out) / "seminorm.json", dump_deterministic(out));
    std::cout << "seminorm value " << out["value"] << "\n";
    return 0;
}

int cmd_extend(const Knobs& k) {
    Json req = read_request(k);
    CompactBox K = box_from_request(req, k);
    Json out{{"schema", 1}};

    std::vector<double> times = req.at("times").get<std::vector<double>>();
    TimeInterval span(*std::min_element(times.begin(), times.end()),
                      *std::max_element(times.begin(), times.end()));
    if (!(span.length() > 0.0)) span = TimeInterval(span.t_start, span.t_start + 1.0);
    StepField X = field_from_request(req, k, span);

    if (req.at("field").contains("breakpoints")) {
        out["domain_estimate"] = to_json(domain_estimate(X, K, times));
    } else {
        int n = req.at("field").at("n").get<int>();
        std::vector<Expression> comps;
        for (const auto& cj : req.at("field").at("components"))
            comps.push_back(parse_expression(cj.get<std::string>(), n));
        VectorField V(n, std::move(comps));
        out["domain_estimate"] = to_json(domain_estimate(V, K, times));
    }

    if (req.contains("interval")) {
        TimeInterval T = interval_from_request(req);
        WeightSequence a = weights_from_request(req, k);
        Polydisc V(K, req.value("polydisc_radius", k.radius));
        int samples = req.value("time_samples", 33);
        IntegrabilityReport ir;
        if (req.at("field").contains("breakpoints")) {
            ir = integrability_report(X, T, K, a, V, samples);
        } else {
            int n = req.at("field").at("n").get<int>();
            std::vector<Expression> comps;
            for (const auto& cj : req.at("field").at("components"))
                comps.push_back(parse_expression(cj.get<std::string>(), n));
            ir = integrability_report(VectorField(n, std::move(comps)), T, K, a, V, samples);
        }
        out["integrability"] = to_json(ir);
        write_file(fs::path(k.out) / "integrability.csv", integrability_csv(ir));
    }

    if (req.contains("family") && req.contains("candidate_radii")) {
        std::vector<StepField> family;
        for (const auto& fj : req.at("family")) family.push_back(stepfield_from_json(fj));
        out["common_majorant"] = to_json(common_majorant(
            family, K, req.at("candidate_radii").get<std::vector<double>>()));
    }

    write_file(fs::path(k.out) / "extension.json", dump_deterministic(out));
    std::cout << "extension verdict: " << out["domain_estimate"]["verdict"] << "\n";
    return 0;
}

int cmd_verify(const Knobs& k) {
    bool all_pass = true;
    Json summary{{"schema", 1}};
    Json suites = Json::array();

    ExperimentReport rk4 = series_vs_rk4_suite();
    write_file(fs::path(k.out) / "series_vs_rk4.json", dump_deterministic(to_json(rk4)));
    suites.push_back(Json{{"name", rk4.name}, {"pass", rk4.pass}});
    all_pass = all_pass && rk4.pass;

    Json continuity = Json::array();
    for (const auto& rep : continuity_suite()) {
        continuity.push_back(to_json(rep));
        suites.push_back(Json{{"name", rep.name}, {"pass", rep.pass}});
        all_pass = all_pass && rep.pass;
    }
    write_file(fs::path(k.out) / "continuity.json", dump_deterministic(continuity));

    Json examples = Json::array();
    for (const auto& rep : run_paper_examples()) {
        examples.push_back(to_json(rep));
        suites.push_back(Json{{"name", rep.name}, {"pass", rep.pass}});
        all_pass = all_pass && rep.pass;
    }
    write_file(fs::path(k.out) / "examples.json", dump_deterministic(examples));

    summary["suites"] = suites;
    summary["pass"] = all_pass;
    write_file(fs::path(k.out) / "summary.json", dump_deterministic(summary));
    for (const auto& s : suites)
        std::cout << (s["pass"].get<bool>() ? "[PASS] " : "[FAIL] ")
                  << s["name"].get<std::string>() << "\n";
    if (!all_pass) return 3;
    return 0;
}

int cmd_examples(const Knobs& k) {
    Json examples = Json::array();
    bool all_pass = true;
    for (const auto& rep : run_paper_examples()) {
        examples.push_back(to_json(rep));
        all_pass = all_pass && rep.pass;
        std::cout << (rep.pass ? "[PASS] " : "[FAIL] ") << rep.name << "\n";
    }
    write_file(fs::path(k.out) / "examples.json", dump_deterministic(examples));
    return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anaflow: certified chronological-series flows of time-varying analytic "
                 "vector fields"};
    app.require_subcommand(1);

    Knobs k;
    app.add_option("--input", k.input, "request JSON path")->envname("ANAFLOW_INPUT");
    app.add_option("--out", k.out, "output directory")->envname("ANAFLOW_OUT");
    app.add_option("--order", k.order, "truncation horizon R")->envname("ANAFLOW_ORDER");
    app.add_option("--tail", k.tail, "target truncation tail")->envname("ANAFLOW_TAIL");
    app.add_option("--radius", k.radius, "polydisc radius")->envname("ANAFLOW_RADIUS");
    app.add_option("--grid", k.grid, "box grid resolution")->envname("ANAFLOW_GRID");
    app.add_option("--threads", k.threads, "worker threads for grid sweeps")
        ->envname("ANAFLOW_THREADS");
    app.add_option("--seed", k.seed, "seed for randomized suites")->envname("ANAFLOW_SEED");

    auto* flow = app.add_subcommand("flow", "certify and evaluate point flows");
    auto* seminorm = app.add_subcommand("seminorm", "compute C^omega seminorms");
    auto* extend = app.add_subcommand("extend", "extension domains and integrability");
    auto* certify_cmd = app.add_subcommand("certify", "emit a flow certificate");
    auto* verify = app.add_subcommand("verify", "run the oracle suites");
    auto* examples = app.add_subcommand("examples", "run the bundled example suite");
    for (auto* sub : {flow, seminorm, extend, certify_cmd, verify, examples})
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    if (k.order < 1 || k.grid < 2 || k.threads < 1 || !(k.tail > 0.0) || !(k.radius > 0.0)) {
        std::cerr << "error (schema): knobs must be positive\n";
        return 1;
    }
    set_thread_count(k.threads);

    try {
        if (flow->parsed()) return cmd_flow(k, true);
        if (certify_cmd->parsed()) return cmd_flow(k, false);
        if (seminorm->parsed()) return cmd_seminorm(k);
        if (extend->parsed()) return cmd_extend(k);
        if (verify->parsed()) return cmd_verify(k);
        if (examples->parsed()) return cmd_examples(k);
    } catch (const CertifyError& e) {
        return fail(k, 2, "certification", e.what());
    } catch (const ParseError& e) {
        return fail(k, 1, "schema", e.what());
    } catch (const Json::exception& e) {
        return fail(k, 1, "schema", e.what());
    } catch (const std::invalid_argument& e) {
        return fail(k, 1, "schema", e.what());
    } catch (const std::exception& e) {
        return fail(k, 2, "internal", e.what());
    }
    return 0;
}
