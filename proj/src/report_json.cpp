#include "anaflow/report_json.hpp"

#include "anaflow/numfmt.hpp"

#include <cmath>
#include <sstream>

namespace anaflow {

namespace {

void dump_rec(const Json& j, std::string& out, int indent, int depth) {
    std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
    std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in + Json(it.key()).dump() + ": ";
                dump_rec(it.value(), out, indent, depth + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                dump_rec(v, out, indent, depth + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case Json::value_t::number_float:
            out += fmt17(j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

}  // namespace

std::string dump_deterministic(const Json& j, int indent) {
    std::string out;
    dump_rec(j, out, indent, 0);
    out += "\n";
    return out;
}

Json json_number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

Json stepfield_to_json(const StepField& X) {
    Json j;
    j["n"] = X.dim;
    j["breakpoints"] = X.breakpoints;
    Json pieces = Json::array();
    for (const auto& p : X.pieces) {
        Json comps = Json::array();
        for (const auto& c : p.components) comps.push_back(c.str());
        pieces.push_back(Json{{"components", comps}});
    }
    j["pieces"] = pieces;
    return j;
}

StepField stepfield_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("breakpoints") ||
        !j.contains("pieces"))
        throw std::invalid_argument(
            "step field document needs fields n, breakpoints, pieces");
    int n = j.at("n").get<int>();
    std::vector<double> breaks = j.at("breakpoints").get<std::vector<double>>();
    std::vector<VectorField> pieces;
    for (const auto& pj : j.at("pieces")) {
        std::vector<Expression> comps;
        for (const auto& cj : pj.at("components"))
            comps.push_back(parse_expression(cj.get<std::string>(), n));
        pieces.emplace_back(n, std::move(comps));
    }
    return StepField(n, std::move(breaks), std::move(pieces));
}

Json box_to_json(const CompactBox& K) {
    return Json{{"lo", K.lo}, {"hi", K.hi}, {"grid", K.grid}};
}

CompactBox box_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("lo") || !j.contains("hi"))
        throw std::invalid_argument("box document needs fields lo, hi");
    return CompactBox(j.at("lo").get<std::vector<double>>(),
                      j.at("hi").get<std::vector<double>>(),
                      j.value("grid", 33));
}

Json to_json(const SeminormValue& v) {
    Json j;
    j["schema"] = 1;
    j["value"] = json_number(v.value());
    j["computed_sup"] = json_number(v.computed_sup);
    j["achieved_at"] = Json{{"order", v.achieved_order}, {"point", v.achieved_at}};
    if (v.tail_bound)
        j["tail_bound"] = json_number(*v.tail_bound);
    else
        j["tail_bound"] = nullptr;
    j["rigorous"] = v.rigorous;
    j["last_order_term"] = json_number(v.last_order_term);
    return j;
}

namespace {
const char* verdict_name(ExtensionVerdict v) {
    switch (v) {
        case ExtensionVerdict::UniformlyExtendable: return "uniformly extendable";
        case ExtensionVerdict::RadiusToZero: return "radius -> 0 (no uniform extension)";
        default: return "inconclusive";
    }
}
}  // namespace

Json to_json(const DomainEstimate& e) {
    Json j;
    j["schema"] = 1;
    j["times"] = e.times;
    Json radii = Json::array();
    for (const auto& row : e.point_radii) {
        Json r = Json::array();
        for (double v : row) r.push_back(json_number(v));
        radii.push_back(r);
    }
    j["point_radii"] = radii;
    Json minima = Json::array();
    for (double v : e.time_minima) minima.push_back(json_number(v));
    j["time_minima"] = minima;
    j["inf_radius"] = json_number(e.inf_radius);
    j["verdict"] = verdict_name(e.verdict);
    j["note"] = e.note;
    return j;
}

Json to_json(const IntegrabilityReport& r) {
    Json j;
    j["schema"] = 1;
    j["times"] = r.times;
    Json ms = Json::array();
    for (double v : r.m_samples) ms.push_back(json_number(v));
    j["m_samples"] = ms;
    Json Ms = Json::array();
    for (double v : r.M_of_t) Ms.push_back(json_number(v));
    j["M_of_t"] = Ms;
    j["locally_integrally_bounded"] = r.locally_integrally_bounded;
    j["seminorm_integral_diverges"] = r.seminorm_integral_diverges;
    j["singular_samples"] = r.singular_samples;
    j["seminorm_integral_base"] = json_number(r.seminorm_integral_base);
    j["seminorm_integral_refined"] = json_number(r.seminorm_integral_refined);
    return j;
}

Json to_json(const CommonMajorant& m) {
    Json j;
    j["schema"] = 1;
    j["found"] = m.found;
    j["d_star"] = json_number(m.d_star);
    j["p_sup"] = json_number(m.p_sup);
    j["failure"] = m.failure;
    return j;
}

Json to_json(const FlowCertificate& c) {
    Json j;
    j["schema"] = 1;
    j["field_digest"] = c.field_digest;
    j["span"] = Json::array({c.span.t_start, c.span.t_end});
    j["initial_box"] = box_to_json(c.initial_box);
    j["polydisc_radius"] = json_number(c.polydisc_radius);
    j["observable"] = c.observable;
    j["target_tail"] = json_number(c.target_tail);
    Json subs = Json::array();
    for (const auto& s : c.subintervals) {
        Json sj;
        sj["t_lo"] = json_number(s.t_lo);
        sj["t_hi"] = json_number(s.t_hi);
        sj["piece"] = s.piece;
        sj["m"] = json_number(s.m_bound);
        sj["M"] = json_number(s.M);
        sj["order"] = s.order;
        sj["M_f"] = json_number(s.M_f);
        sj["Mtil_f"] = json_number(s.Mtil_f);
        sj["M_coord"] = json_number(s.M_coord);
        sj["tail_bound"] = json_number(s.tail_bound);
        sj["coord_tail"] = json_number(s.coord_tail);
        sj["lipschitz"] = json_number(s.lipschitz);
        sj["box"] = box_to_json(s.box);
        sj["disc_radius"] = json_number(s.disc_radius);
        subs.push_back(sj);
    }
    j["subintervals"] = subs;
    j["total_tail"] = json_number(c.total_tail());
    j["residual_bound"] = json_number(c.residual_bound());
    return j;
}

Json to_json(const ExperimentReport& r) {
    Json j;
    j["schema"] = 1;
    j["name"] = r.name;
    j["inputs_digest"] = r.inputs_digest;
    j["pass"] = r.pass;
    Json fitted = Json::object();
    for (const auto& [k, v] : r.fitted) fitted[k] = json_number(v);
    j["fitted"] = fitted;
    Json cases = Json::array();
    for (const auto& c : r.cases) {
        Json cj;
        cj["input"] = c.input;
        cj["series_value"] = json_number(c.series_value);
        cj["oracle_value"] = json_number(c.oracle_value);
        cj["diff"] = json_number(c.diff);
        cj["bound"] = json_number(c.bound);
        cj["pass"] = c.pass;
        cases.push_back(cj);
    }
    j["cases"] = cases;
    return j;
}

std::string trajectory_csv(int dim, const std::vector<int>& point_ids,
                           const std::vector<double>& ts,
                           const std::vector<std::vector<double>>& xs,
                           const std::vector<double>& residuals) {
    std::ostringstream os;
    os << "point,t";
    for (int i = 1; i <= dim; ++i) os << ",x" << i;
    os << ",residual_bound\n";
    for (std::size_t r = 0; r < ts.size(); ++r) {
        os << point_ids[r] << "," << fmt17(ts[r]);
        for (double v : xs[r]) os << "," << fmt17(v);
        os << "," << fmt17(residuals[r]) << "\n";
    }
    return os.str();
}

std::string integrability_csv(const IntegrabilityReport& r) {
    std::ostringstream os;
    os << "t,m,M\n";
    for (std::size_t i = 0; i < r.times.size(); ++i)
        os << fmt17(r.times[i]) << "," << fmt17(r.m_samples[i]) << "," << fmt17(r.M_of_t[i])
           << "\n";
    return os.str();
}

}  // namespace anaflow
