#include "wjsr/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace wjsr {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& ex) {
        throw std::invalid_argument(std::string(what) + ": " + ex.what());
    }
}

const json& need(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key))
        throw std::invalid_argument(where + ": missing field '" + key + "'");
    return j.at(key);
}

double number_from(const json& j, const std::string& where) {
    if (!j.is_number())
        throw std::invalid_argument(where + ": expected a number");
    return j.get<double>();
}

int index_from(const json& j, const std::string& where) {
    if (!j.is_number_integer())
        throw std::invalid_argument(where + ": expected an integer");
    return j.get<int>();
}

Vec vec_from(const json& j, const std::string& where) {
    if (!j.is_array())
        throw std::invalid_argument(where + ": expected an array of numbers");
    Vec v(j.size());
    for (size_t i = 0; i < j.size(); ++i)
        v[i] = number_from(j[i], where + "[" + std::to_string(i) + "]");
    return v;
}

Mat mat_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        throw std::invalid_argument(where + ": expected an array of rows");
    const size_t rows = j.size();
    size_t cols = 0;
    Mat m(0, 0);
    for (size_t i = 0; i < rows; ++i) {
        Vec row = vec_from(j[i], where + "[" + std::to_string(i) + "]");
        if (i == 0) {
            cols = row.size();
            if (cols == 0)
                throw std::invalid_argument(where + ": empty row");
            m = Mat(int(rows), int(cols));
        } else if (row.size() != cols) {
            throw std::invalid_argument(where + ": ragged rows");
        }
        for (size_t k = 0; k < cols; ++k) m(int(i), int(k)) = row[k];
    }
    return m;
}

// Rationals appear as exact strings ("2/5") or as JSON numbers; a number is
// recovered through its shortest round-trip decimal form, so any literal
// someone can type survives exactly.
Rational rat_from(const json& j, const std::string& where) {
    try {
        if (j.is_string()) return parse_rational(j.get<std::string>());
        if (j.is_number_integer())
            return make_rational(j.get<long long>(), 1);
        if (j.is_number_float()) return parse_rational(j.dump());
    } catch (const std::exception& ex) {
        throw std::invalid_argument(where + ": " + ex.what());
    }
    throw std::invalid_argument(where +
                                ": expected a rational (\"2/5\" or number)");
}

json vec_to(const Vec& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

json mat_to(const Mat& m) {
    json a = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        a.push_back(row);
    }
    return a;
}

json poly_to(const SymPolytope& p) {
    json a = json::array();
    for (const Vec& v : p.vertices) a.push_back(vec_to(v));
    return a;
}

void set_if_finite(json& j, const char* key, double v) {
    if (std::isfinite(v)) j[key] = v;
}

json signal_to(const SignalSpec& s) {
    json runs = json::array();
    for (const SignalRun& r : s.runs)
        runs.push_back({{"mode", r.mode + 1}, {"duration", to_string(r.duration)}});
    return json{{"word", s.word},
                {"cell", to_string(s.cell)},
                {"period", to_string(s.period())},
                {"runs", runs}};
}

}  // namespace

WeightedSystem weighted_from_json(const std::string& text) {
    json j = parse_json(text, "weighted system");
    WeightedSystem sys;
    const json& mats = need(j, "matrices", "weighted system");
    if (!mats.is_array())
        throw std::invalid_argument("weighted system: 'matrices' must be an array");
    for (size_t i = 0; i < mats.size(); ++i)
        sys.matrices.push_back(
            mat_from(mats[i], "matrices[" + std::to_string(i) + "]"));
    sys.weights = vec_from(need(j, "weights", "weighted system"), "weights");
    if (j.contains("labels")) {
        const json& labels = j.at("labels");
        if (!labels.is_array())
            throw std::invalid_argument("weighted system: 'labels' must be an array");
        for (size_t i = 0; i < labels.size(); ++i) {
            if (!labels[i].is_string())
                throw std::invalid_argument("labels[" + std::to_string(i) +
                                            "]: expected a string");
            sys.labels.push_back(labels[i].get<std::string>());
        }
    }
    sys.validate();
    return sys;
}

std::string weighted_to_json(const WeightedSystem& sys) {
    json j;
    json mats = json::array();
    for (const Mat& m : sys.matrices) mats.push_back(mat_to(m));
    j["matrices"] = mats;
    j["weights"] = vec_to(sys.weights);
    if (!sys.labels.empty()) j["labels"] = sys.labels;
    return j.dump(2) + "\n";
}

MixedSystem mixed_from_json(const std::string& text) {
    json j = parse_json(text, "mixed system");
    MixedSystem ms;
    const json& discrete = need(j, "discrete", "mixed system");
    if (!discrete.is_array())
        throw std::invalid_argument("mixed system: 'discrete' must be an array");
    std::vector<double> alphas;
    for (size_t i = 0; i < discrete.size(); ++i) {
        const std::string where = "discrete[" + std::to_string(i) + "]";
        ms.jumps.push_back(mat_from(need(discrete[i], "A", where), where + ".A"));
        alphas.push_back(number_from(need(discrete[i], "alpha", where),
                                     where + ".alpha"));
    }
    ms.jump_weights = Vec(alphas.begin(), alphas.end());
    if (j.contains("continuous")) {
        const json& cont = j.at("continuous");
        if (!cont.is_array())
            throw std::invalid_argument("mixed system: 'continuous' must be an array");
        for (size_t i = 0; i < cont.size(); ++i)
            ms.generators.push_back(
                mat_from(cont[i], "continuous[" + std::to_string(i) + "]"));
    }
    ms.validate();
    return ms;
}

std::string mixed_to_json(const MixedSystem& ms) {
    json j;
    json discrete = json::array();
    for (size_t i = 0; i < ms.jumps.size(); ++i)
        discrete.push_back(
            {{"A", mat_to(ms.jumps[i])}, {"alpha", ms.jump_weights[i]}});
    j["discrete"] = discrete;
    if (!ms.generators.empty()) {
        json cont = json::array();
        for (const Mat& b : ms.generators) cont.push_back(mat_to(b));
        j["continuous"] = cont;
    }
    return j.dump(2) + "\n";
}

GraphSystem graph_from_json(const std::string& text) {
    json j = parse_json(text, "graph system");
    GraphSystem gs;
    const json& vertices = need(j, "vertices", "graph system");
    if (!vertices.is_array() || vertices.empty())
        throw std::invalid_argument(
            "graph system: 'vertices' must be a nonempty array");
    bool any_continuous = false;
    std::vector<std::vector<Mat>> generators(vertices.size());
    for (size_t i = 0; i < vertices.size(); ++i) {
        const std::string where = "vertices[" + std::to_string(i) + "]";
        gs.dims.push_back(index_from(need(vertices[i], "dim", where), where + ".dim"));
        if (vertices[i].contains("continuous")) {
            const json& cont = vertices[i].at("continuous");
            if (!cont.is_array())
                throw std::invalid_argument(where + ".continuous: expected an array");
            for (size_t k = 0; k < cont.size(); ++k)
                generators[i].push_back(mat_from(
                    cont[k], where + ".continuous[" + std::to_string(k) + "]"));
            any_continuous = any_continuous || !generators[i].empty();
        }
    }
    if (any_continuous) gs.generators = std::move(generators);
    const json& edges = need(j, "edges", "graph system");
    if (!edges.is_array())
        throw std::invalid_argument("graph system: 'edges' must be an array");
    for (size_t e = 0; e < edges.size(); ++e) {
        const std::string where = "edges[" + std::to_string(e) + "]";
        GraphEdge ge;
        ge.from = index_from(need(edges[e], "from", where), where + ".from");
        ge.to = index_from(need(edges[e], "to", where), where + ".to");
        ge.op = mat_from(need(edges[e], "A", where), where + ".A");
        ge.weight = number_from(need(edges[e], "alpha", where), where + ".alpha");
        if (edges[e].contains("label")) {
            if (!edges[e].at("label").is_string())
                throw std::invalid_argument(where + ".label: expected a string");
            ge.label = edges[e].at("label").get<std::string>();
        }
        gs.edges.push_back(std::move(ge));
    }
    gs.validate();
    return gs;
}

std::string graph_to_json(const GraphSystem& gs) {
    json j;
    json vertices = json::array();
    for (size_t i = 0; i < gs.dims.size(); ++i) {
        json v{{"dim", gs.dims[i]}};
        if (!gs.generators.empty() && !gs.generators[i].empty()) {
            json cont = json::array();
            for (const Mat& b : gs.generators[i]) cont.push_back(mat_to(b));
            v["continuous"] = cont;
        }
        vertices.push_back(v);
    }
    j["vertices"] = vertices;
    json edges = json::array();
    for (const GraphEdge& e : gs.edges) {
        json je{{"from", e.from}, {"to", e.to}, {"A", mat_to(e.op)},
                {"alpha", e.weight}};
        if (!e.label.empty()) je["label"] = e.label;
        edges.push_back(je);
    }
    j["edges"] = edges;
    return j.dump(2) + "\n";
}

DwellSystem dwell_from_json(const std::string& text) {
    json j = parse_json(text, "dwell system");
    DwellSystem ds;
    const json& gens = need(j, "generators", "dwell system");
    if (!gens.is_array())
        throw std::invalid_argument("dwell system: 'generators' must be an array");
    for (size_t i = 0; i < gens.size(); ++i)
        ds.generators.push_back(
            mat_from(gens[i], "generators[" + std::to_string(i) + "]"));
    const json& dwell = need(j, "dwell_times", "dwell system");
    if (!dwell.is_array())
        throw std::invalid_argument("dwell system: 'dwell_times' must be an array");
    for (size_t i = 0; i < dwell.size(); ++i)
        ds.dwell.push_back(
            rat_from(dwell[i], "dwell_times[" + std::to_string(i) + "]"));
    ds.validate();
    return ds;
}

std::string dwell_to_json(const DwellSystem& ds) {
    json j;
    json gens = json::array();
    for (const Mat& b : ds.generators) gens.push_back(mat_to(b));
    j["generators"] = gens;
    json dwell = json::array();
    for (const Rational& r : ds.dwell) dwell.push_back(to_string(r));
    j["dwell_times"] = dwell;
    return j.dump(2) + "\n";
}

SwitchingLaw law_from_json(const std::string& text) {
    json j = parse_json(text, "switching law");
    const json& events = j.is_array() ? j : need(j, "events", "switching law");
    if (!events.is_array())
        throw std::invalid_argument("switching law: 'events' must be an array");
    SwitchingLaw law;
    for (size_t i = 0; i < events.size(); ++i) {
        const std::string where = "events[" + std::to_string(i) + "]";
        SwitchEvent ev;
        const json& kind = need(events[i], "kind", where);
        if (kind == "jump") {
            ev.kind = SwitchEvent::Kind::jump;
        } else if (kind == "flow") {
            ev.kind = SwitchEvent::Kind::flow;
        } else {
            throw std::invalid_argument(where + ".kind: expected \"jump\" or \"flow\"");
        }
        ev.mode = index_from(need(events[i], "mode", where), where + ".mode") - 1;
        if (ev.mode < 0)
            throw std::invalid_argument(where + ".mode: modes are numbered from 1");
        if (events[i].contains("duration"))
            ev.duration = number_from(events[i].at("duration"), where + ".duration");
        law.events.push_back(ev);
    }
    return law;
}

std::string mode_word_string(const std::vector<int>& word) {
    bool digits = true;
    for (int m : word) digits = digits && m >= 0 && m <= 8;
    std::string s;
    for (size_t i = 0; i < word.size(); ++i) {
        if (!digits && i) s += ' ';
        s += std::to_string(word[i] + 1);
    }
    return s;
}

const char* status_name(IpaStatus s) {
    switch (s) {
        case IpaStatus::converged: return "converged";
        case IpaStatus::budget_exceeded: return "budget_exceeded";
        case IpaStatus::degenerate_leading_eigenvalue:
            return "degenerate_leading_eigenvalue";
        case IpaStatus::reducible_detected: return "reducible_detected";
    }
    return "unknown";
}

std::string ipa_report_json(const IpaResult& res) {
    json j;
    j["status"] = status_name(res.status);
    set_if_finite(j, "rho", res.candidate.rho_c);
    if (std::isfinite(res.candidate.rho_c) && res.candidate.rho_c > 0.0)
        j["beta"] = std::log(res.candidate.rho_c);
    j["witness"] = mode_word_string(res.candidate.product.word);
    json modes = json::array();
    for (int m : res.candidate.product.word) modes.push_back(m + 1);
    j["witness_modes"] = modes;
    j["rounds"] = res.rounds;
    set_if_finite(j, "eps_extremal", res.eps_extremal);
    j["growth"] = vec_to(Vec(res.growth.begin(), res.growth.end()));
    j["polytope"] = poly_to(res.polytope);
    return j.dump(2) + "\n";
}

std::string bounds_report_json(const BoundsReport& rep) {
    json j;
    j["status"] = status_name(rep.status);
    set_if_finite(j, "tau", rep.tau);
    set_if_finite(j, "beta", rep.beta);
    set_if_finite(j, "rho", rep.rho);
    j["mu_valid"] = rep.mu_valid;
    if (rep.mu_valid) {
        set_if_finite(j, "mu", rep.mu);
        set_if_finite(j, "mu_flow", rep.mu_flow);
    }
    set_if_finite(j, "eps_extremal", rep.eps_extremal);
    j["rounds"] = rep.rounds;
    j["witness"] = mode_word_string(rep.witness);
    json modes = json::array();
    for (int m : rep.witness) modes.push_back(m + 1);
    j["witness_modes"] = modes;
    j["polytope"] = poly_to(rep.polytope);
    return j.dump(2) + "\n";
}

std::string graph_report_json(const GraphSystem& gs, const GraphIpaResult& res) {
    json j;
    j["status"] = status_name(res.status);
    set_if_finite(j, "rho", res.candidate.rho_c);
    if (std::isfinite(res.candidate.rho_c) && res.candidate.rho_c > 0.0)
        j["beta"] = std::log(res.candidate.rho_c);
    j["witness_edges"] = res.candidate.path.edges;
    json labels = json::array();
    for (int e : res.candidate.path.edges) {
        const std::string& l = gs.edges[size_t(e)].label;
        labels.push_back(l.empty() ? std::to_string(e) : l);
    }
    j["witness_labels"] = labels;
    j["rounds"] = res.rounds;
    set_if_finite(j, "eps_extremal", res.eps_extremal);
    j["growth"] = vec_to(Vec(res.growth.begin(), res.growth.end()));
    json parts = json::array();
    for (const SymPolytope& p : res.multinorm.parts) parts.push_back(poly_to(p));
    j["multinorm"] = parts;
    return j.dump(2) + "\n";
}

std::string dwell_reports_json(const std::vector<DwellReport>& reps) {
    json arr = json::array();
    for (const DwellReport& rep : reps) {
        json j;
        j["tau"] = to_string(rep.tau);
        j["tau_value"] = rep.tau.value();
        j["constrained"] = rep.constrained;
        if (!rep.error.empty()) {
            j["error"] = rep.error;
            arr.push_back(j);
            continue;
        }
        j["status"] = status_name(rep.status);
        set_if_finite(j, "beta", rep.beta);
        set_if_finite(j, "rho", rep.rho);
        j["mu_valid"] = rep.mu_valid;
        if (rep.mu_valid) {
            set_if_finite(j, "mu", rep.mu);
            set_if_finite(j, "mu_flow", rep.mu_flow);
        }
        set_if_finite(j, "eps_extremal", rep.eps_extremal);
        j["rounds"] = rep.rounds;
        j["witness"] = rep.witness_text;
        j["signal"] = signal_to(rep.signal);
        if (rep.constrained) {
            json parts = json::array();
            for (const SymPolytope& p : rep.multinorm.parts)
                parts.push_back(poly_to(p));
            j["multinorm"] = parts;
        } else {
            j["polytope"] = poly_to(rep.polytope);
        }
        arr.push_back(j);
    }
    return json{{"reports", arr}}.dump(2) + "\n";
}

std::string trajectory_csv(const std::vector<TrajectorySample>& samples) {
    std::string out = "t";
    const size_t d = samples.empty() ? 0 : samples.front().x.size();
    for (size_t i = 1; i <= d; ++i) out += ",x" + std::to_string(i);
    out += ",active\n";
    char buf[64];
    for (const TrajectorySample& s : samples) {
        std::snprintf(buf, sizeof buf, "%.17g", s.t);
        out += buf;
        for (double xi : s.x) {
            std::snprintf(buf, sizeof buf, ",%.17g", xi);
            out += buf;
        }
        out += s.active ? ",1\n" : ",0\n";
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    out << text;
}

}  // namespace wjsr
