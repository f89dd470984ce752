// Command-line front end: parse a system description, dispatch the solver,
// emit a JSON report plus optional CSV/SVG artifacts, and print a one-look
// summary. Exit codes: 0 success, 2 invalid input, 3 search budget exceeded
// (partial results still written), 4 numerical failure.

#include <cmath>
#include <cstdio>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "wjsr/dwell.hpp"
#include "wjsr/graph.hpp"
#include "wjsr/io.hpp"
#include "wjsr/ipa.hpp"
#include "wjsr/mixed.hpp"
#include "wjsr/weighted.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wjsr;

namespace {

struct RunConfig {
    std::string input;
    std::string out_dir = ".";
    std::string law_path;
    std::string tau_text;
    std::string tau_schedule_text;
    std::string x0_text;
    double eps = 1e-8;
    double tol = 1e-9;
    double eta = 1e-10;
    double delta = 1e-4;
    double dt = 0.01;
    int max_len = 64;
    int k_max = 0;
    long max_nodes = 2'000'000;
    int threads = 0;
    long seed = 0;
    bool run_bisection = false;  // jsr: cross-check rho by r-space bisection
};

json config_echo(const RunConfig& cfg) {
    json j{{"eps", cfg.eps},         {"tol", cfg.tol},
           {"eta", cfg.eta},         {"delta", cfg.delta},
           {"max_len", cfg.max_len}, {"k_max", cfg.k_max},
           {"max_nodes", cfg.max_nodes}, {"seed", cfg.seed}};
    if (!cfg.tau_text.empty()) j["tau"] = cfg.tau_text;
    if (!cfg.tau_schedule_text.empty()) j["tau_schedule"] = cfg.tau_schedule_text;
    return j;
}

void apply_threads(const RunConfig& cfg) {
    int threads = cfg.threads;
    if (threads <= 0) {
        if (const char* env = std::getenv("WJSR_THREADS"))
            threads = std::atoi(env);
    }
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

std::string write_artifact(const RunConfig& cfg, const std::string& name,
                           const std::string& text) {
    fs::create_directories(cfg.out_dir);
    const std::string path = (fs::path(cfg.out_dir) / name).string();
    write_text_file(path, text);
    return path;
}

std::vector<Rational> parse_schedule(const std::string& text) {
    std::vector<Rational> out;
    size_t start = 0;
    while (start <= text.size()) {
        size_t comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        std::string item = text.substr(start, comma - start);
        if (!item.empty()) out.push_back(parse_rational(item));
        start = comma + 1;
    }
    if (out.empty())
        throw std::invalid_argument("tau schedule: no entries in '" + text + "'");
    return out;
}

Vec parse_vector(const std::string& text) {
    std::vector<double> vals;
    size_t start = 0;
    while (start <= text.size()) {
        size_t comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        std::string item = text.substr(start, comma - start);
        if (!item.empty()) {
            size_t used = 0;
            vals.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument("vector: bad entry '" + item + "'");
        }
        start = comma + 1;
    }
    return Vec(vals.begin(), vals.end());
}

int exit_code_of(IpaStatus status) {
    return status == IpaStatus::budget_exceeded ? 3 : 0;
}

int run_jsr(const RunConfig& cfg) {
    WeightedSystem sys = weighted_from_json(read_text_file(cfg.input));

    GripenbergOptions gopt;
    gopt.eps = cfg.eps;
    gopt.max_depth = cfg.max_len;
    gopt.max_nodes = cfg.max_nodes;
    JsrBracket bracket = gripenberg(sys, gopt);

    IpaOptions iopt;
    iopt.eta = cfg.eta;
    IpaResult res = invariant_polytope_from(
        sys, find_candidates(sys, cfg.max_len, cfg.max_nodes), iopt);

    json rep = json::parse(ipa_report_json(res));
    rep["bracket"] = {{"lower", bracket.lower},
                      {"upper", bracket.upper},
                      {"converged", bracket.converged},
                      {"nodes", bracket.nodes},
                      {"witness", mode_word_string(bracket.witness)}};
    if (cfg.k_max > 0) {
        RadiusSample sample = rho_k_exact(sys, cfg.k_max);
        rep["rho_k"] = {{"k", cfg.k_max},
                        {"value", sample.value},
                        {"witness", mode_word_string(sample.word)}};
    }
    if (cfg.run_bisection) {
        BisectionOptions bopt;
        bopt.tol = cfg.tol;
        BisectionResult bis = wjsr_bisection(sys, bopt);
        rep["bisection"] = {{"lower", bis.lower},
                            {"upper", bis.upper},
                            {"converged", bis.converged},
                            {"probes", bis.probes}};
    }
    rep["config"] = config_echo(cfg);
    const std::string path = write_artifact(cfg, "jsr_report.json", rep.dump(2) + "\n");

    std::printf("jsr: status=%s rho=%.15g bracket=[%.15g, %.15g] witness=%s "
                "eps=%.3g rounds=%d vertex_pairs=%zu\n",
                status_name(res.status), res.candidate.rho_c, bracket.lower,
                bracket.upper, mode_word_string(res.candidate.product.word).c_str(),
                res.eps_extremal, res.rounds, res.polytope.vertices.size());
    std::printf("wrote: %s\n", path.c_str());
    return exit_code_of(res.status);
}

int run_mixed(const RunConfig& cfg) {
    MixedSystem ms = mixed_from_json(read_text_file(cfg.input));
    const double tau =
        cfg.tau_text.empty() ? 1.0 : parse_rational(cfg.tau_text).value();

    LyapunovOptions opt;
    opt.max_len = cfg.max_len;
    opt.max_nodes = cfg.max_nodes;
    opt.delta = cfg.delta;
    opt.ipa.eta = cfg.eta;
    BoundsReport rep = lyapunov_bounds(ms, tau, opt);

    json j = json::parse(bounds_report_json(rep));
    j["config"] = config_echo(cfg);
    const std::string path =
        write_artifact(cfg, "mixed_report.json", j.dump(2) + "\n");

    if (rep.mu_valid)
        std::printf("mixed: status=%s tau=%.15g bracket=[%.15g, %.15g] "
                    "witness=%s eps=%.3g rounds=%d\n",
                    status_name(rep.status), rep.tau, rep.beta, rep.mu,
                    mode_word_string(rep.witness).c_str(), rep.eps_extremal,
                    rep.rounds);
    else
        std::printf("mixed: status=%s tau=%.15g beta=%.15g (no certified upper "
                    "bound) witness=%s\n",
                    status_name(rep.status), rep.tau, rep.beta,
                    mode_word_string(rep.witness).c_str());
    std::printf("wrote: %s\n", path.c_str());
    return exit_code_of(rep.status);
}

int run_graph(const RunConfig& cfg) {
    GraphSystem gs = graph_from_json(read_text_file(cfg.input));

    IpaOptions iopt;
    iopt.eta = cfg.eta;
    GraphIpaResult res = graph_invariant_polytope_from(
        gs, find_graph_candidates(gs, cfg.max_len, cfg.max_nodes), iopt);

    json rep = json::parse(graph_report_json(gs, res));
    if (cfg.k_max > 0) {
        GraphRadiusSample sample = graph_rho_k_exact(gs, cfg.k_max);
        rep["rho_k"] = {{"k", cfg.k_max},
                        {"value", sample.value},
                        {"path", sample.path}};
    }
    rep["config"] = config_echo(cfg);
    const std::string path =
        write_artifact(cfg, "graph_report.json", rep.dump(2) + "\n");

    std::string labels;
    for (int e : res.candidate.path.edges) {
        if (!labels.empty()) labels += ' ';
        const std::string& l = gs.edges[size_t(e)].label;
        labels += l.empty() ? std::to_string(e) : l;
    }
    std::printf("graph: status=%s rho=%.15g witness=[%s] eps=%.3g rounds=%d\n",
                status_name(res.status), res.candidate.rho_c, labels.c_str(),
                res.eps_extremal, res.rounds);
    std::printf("wrote: %s\n", path.c_str());
    return exit_code_of(res.status);
}

int run_dwell(const RunConfig& cfg) {
    DwellSystem ds = dwell_from_json(read_text_file(cfg.input));

    std::vector<Rational> schedule;
    if (!cfg.tau_schedule_text.empty())
        schedule = parse_schedule(cfg.tau_schedule_text);
    else if (!cfg.tau_text.empty())
        schedule = {parse_rational(cfg.tau_text)};
    else
        schedule = default_tau_schedule(ds);

    DwellOptions opt;
    opt.max_len = cfg.max_len;
    opt.max_nodes = cfg.max_nodes;
    opt.delta = cfg.delta;
    opt.ipa.eta = cfg.eta;
    std::vector<DwellReport> reps = dwell_bounds(ds, schedule, opt);

    json j = json::parse(dwell_reports_json(reps));
    j["config"] = config_echo(cfg);
    const std::string path =
        write_artifact(cfg, "dwell_report.json", j.dump(2) + "\n");

    int code = 0;
    for (const DwellReport& rep : reps) {
        if (!rep.error.empty()) {
            std::printf("dwell tau=%s: failed: %s\n", to_string(rep.tau).c_str(),
                        rep.error.c_str());
            code = std::max(code, 4);
            continue;
        }
        if (rep.mu_valid)
            std::printf("dwell tau=%-6s status=%s bracket=[%.15g, %.15g] "
                        "witness=%s signal=(%s)\n",
                        to_string(rep.tau).c_str(), status_name(rep.status),
                        rep.beta, rep.mu, rep.witness_text.c_str(),
                        rep.signal.word.c_str());
        else
            std::printf("dwell tau=%-6s status=%s beta=%.15g (no certified "
                        "upper bound) witness=%s\n",
                        to_string(rep.tau).c_str(), status_name(rep.status),
                        rep.beta, rep.witness_text.c_str());
        code = std::max(code, exit_code_of(rep.status));
    }
    std::printf("wrote: %s\n", path.c_str());
    return code;
}

int run_simulate(const RunConfig& cfg) {
    MixedSystem ms = mixed_from_json(read_text_file(cfg.input));
    if (cfg.law_path.empty())
        throw std::invalid_argument("simulate: --law <file> is required");
    SwitchingLaw law = law_from_json(read_text_file(cfg.law_path));

    Vec x0;
    if (!cfg.x0_text.empty()) {
        x0 = parse_vector(cfg.x0_text);
        if (int(x0.size()) != ms.dim())
            throw std::invalid_argument("simulate: --x0 has wrong dimension");
    } else {
        x0 = Vec(ms.dim(), 0.0);
        x0[0] = 1.0;
    }

    std::vector<TrajectorySample> samples = simulate(ms, law, x0, cfg.dt);
    const std::string path =
        write_artifact(cfg, "trajectory.csv", trajectory_csv(samples));

    double rate = 0.0;
    if (samples.size() >= 2 && samples.back().t > 0.0) {
        const double n0 = norm2(samples.front().x);
        const double n1 = norm2(samples.back().x);
        if (n0 > 0.0 && n1 > 0.0)
            rate = (std::log(n1) - std::log(n0)) / samples.back().t;
    }
    std::printf("simulate: samples=%zu horizon=%.15g growth_rate=%.15g\n",
                samples.size(), samples.empty() ? 0.0 : samples.back().t, rate);
    std::printf("wrote: %s\n", path.c_str());
    return 0;
}

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    return out;
}

SymPolytope poly_from(const json& j) {
    SymPolytope p;
    for (const json& v : j) {
        Vec vert(v.size());
        for (size_t i = 0; i < v.size(); ++i) vert[i] = v[i].get<double>();
        p.vertices.push_back(vert);
    }
    p.dim = p.vertices.empty() ? 0 : int(p.vertices.front().size());
    return p;
}

int emit_svg(const RunConfig& cfg, const std::string& name,
             const SymPolytope& p, std::vector<std::string>& written) {
    if (p.dim != 2) {
        std::printf("plot: skipping %s (dimension %d, only 2-D is drawable)\n",
                    name.c_str(), p.dim);
        return 0;
    }
    written.push_back(write_artifact(cfg, name, polytope_to_svg(p)));
    return 1;
}

int run_plot(const RunConfig& cfg) {
    const std::string text = read_text_file(cfg.input);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& ex) {
        throw std::invalid_argument(std::string("plot: ") + ex.what());
    }
    const std::string stem = fs::path(cfg.input).stem().string();
    std::vector<std::string> written;
    int plotted = 0;

    if (j.is_array()) {
        plotted += emit_svg(cfg, stem + ".svg", poly_from(j), written);
    } else if (j.contains("polytope")) {
        plotted += emit_svg(cfg, stem + ".svg", poly_from(j.at("polytope")), written);
    } else if (j.contains("multinorm")) {
        const json& parts = j.at("multinorm");
        for (size_t k = 0; k < parts.size(); ++k)
            plotted += emit_svg(cfg, stem + "_L" + std::to_string(k + 1) + ".svg",
                                poly_from(parts[k]), written);
    } else if (j.contains("reports")) {
        for (const json& rep : j.at("reports")) {
            if (!rep.contains("tau")) continue;
            const std::string tag = stem + "_tau_" + sanitize(rep.at("tau").get<std::string>());
            if (rep.contains("polytope"))
                plotted += emit_svg(cfg, tag + ".svg", poly_from(rep.at("polytope")),
                                    written);
            if (rep.contains("multinorm")) {
                const json& parts = rep.at("multinorm");
                for (size_t k = 0; k < parts.size(); ++k)
                    plotted += emit_svg(cfg, tag + "_L" + std::to_string(k + 1) + ".svg",
                                        poly_from(parts[k]), written);
            }
        }
    } else {
        throw std::invalid_argument(
            "plot: input has no 'polytope', 'multinorm', or 'reports' field");
    }
    if (plotted == 0)
        throw std::invalid_argument("plot: nothing drawable in input");
    for (const std::string& path : written)
        std::printf("wrote: %s\n", path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certified Lyapunov-exponent brackets for switching systems "
                 "with dwell times (weighted/graph joint spectral radius, "
                 "invariant polytopes)"};
    app.require_subcommand(1);

    RunConfig cfg;
    auto add_common = [&](CLI::App* cmd, bool takes_input = true) {
        if (takes_input)
            cmd->add_option("input", cfg.input, "input JSON file")->required();
        cmd->add_option("--eps", cfg.eps, "branch-and-bound gap target");
        cmd->add_option("--tol", cfg.tol, "bisection relative tolerance");
        cmd->add_option("--eta", cfg.eta, "polytope interiority margin");
        cmd->add_option("--delta", cfg.delta, "flow-shift finite-difference step");
        cmd->add_option("--max-len", cfg.max_len, "candidate word length cap");
        cmd->add_option("--k-max", cfg.k_max,
                        "exhaustive radius sample length (0 = off)");
        cmd->add_option("--max-nodes", cfg.max_nodes, "search node budget");
        cmd->add_option("--out", cfg.out_dir, "output directory");
        cmd->add_option("--threads", cfg.threads,
                        "worker threads (default: WJSR_THREADS or all cores)");
        cmd->add_option("--seed", cfg.seed, "seed echoed into reports for audits");
        return cmd;
    };

    CLI::App* jsr = add_common(app.add_subcommand(
        "jsr", "weighted joint spectral radius with polytope certificate"));
    CLI::App* mixed = add_common(app.add_subcommand(
        "mixed", "Lyapunov-exponent bracket for a jump/flow system"));
    mixed->add_option("--tau", cfg.tau_text, "flow discretization step");
    CLI::App* graph = add_common(app.add_subcommand(
        "graph", "constrained switching on a labeled multigraph"));
    (void)graph;
    CLI::App* dwell = add_common(app.add_subcommand(
        "dwell", "dwell-time system bracket over a tau schedule"));
    dwell->add_option("--tau", cfg.tau_text, "single discretization step");
    dwell->add_option("--tau-schedule", cfg.tau_schedule_text,
                      "comma-separated rational steps, e.g. 1,2/5,1/10");
    CLI::App* simulate = add_common(app.add_subcommand(
        "simulate", "integrate a switching law and write a trajectory CSV"));
    simulate->add_option("--law", cfg.law_path, "switching-law JSON file");
    simulate->add_option("--x0", cfg.x0_text, "initial state, e.g. 1,0");
    simulate->add_option("--dt", cfg.dt, "sample spacing");
    CLI::App* plot = add_common(app.add_subcommand(
        "plot", "render polytopes/multinorms from a report as SVG"));
    (void)plot;

    CLI11_PARSE(app, argc, argv);
    cfg.run_bisection = jsr->count("--tol") > 0;
    apply_threads(cfg);

    try {
        if (app.got_subcommand("jsr")) return run_jsr(cfg);
        if (app.got_subcommand("mixed")) return run_mixed(cfg);
        if (app.got_subcommand("graph")) return run_graph(cfg);
        if (app.got_subcommand("dwell")) return run_dwell(cfg);
        if (app.got_subcommand("simulate")) return run_simulate(cfg);
        if (app.got_subcommand("plot")) return run_plot(cfg);
    } catch (const std::invalid_argument& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 2;
    } catch (const NumericalError& ex) {
        std::fprintf(stderr, "numerical failure: %s\n", ex.what());
        return 4;
    } catch (const std::runtime_error& ex) {
        std::fprintf(stderr, "budget exceeded: %s\n", ex.what());
        return 3;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "failure: %s\n", ex.what());
        return 4;
    }
    return 0;
}
