#include "anaflow/report_json.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace anaflow;

namespace {

VectorField make_field(int dim, const std::vector<std::string>& components) {
    std::vector<Expression> comps;
    comps.reserve(components.size());
    for (const auto& s : components) comps.push_back(parse_expression(s, dim));
    return VectorField(dim, std::move(comps));
}

StepField field_from_json_str(const std::string& text) {
    return stepfield_from_json(Json::parse(text));
}

}  // namespace

PYBIND11_MODULE(_anaflow, m) {
    m.doc() = "Certified chronological-series flows of time-varying analytic vector fields";

    py::register_exception<ParseError>(m, "ParseError");
    py::register_exception<DomainError>(m, "DomainError");
    py::register_exception<CertifyError>(m, "CertifyError");

    py::class_<Expression>(m, "Expression")
        .def(py::init([](const std::string& text, int dim) {
                 return parse_expression(text, dim);
             }),
             py::arg("text"), py::arg("dim") = 1)
        .def("__str__", &Expression::str)
        .def("__repr__", [](const Expression& e) { return "Expression(" + e.str() + ")"; })
        .def("eval", &Expression::eval_real, py::arg("x"), py::arg("t") = 0.0)
        .def("eval_complex", &Expression::eval_complex, py::arg("z"), py::arg("t") = 0.0)
        .def("diff", &Expression::diff, py::arg("axis"))
        .def("with_time_frozen", &Expression::with_time_frozen)
        .def("depends_on_time", &Expression::depends_on_time)
        .def("jet_coefficients",
             [](const Expression& e, const std::vector<double>& x0, double t, int degree) {
                 Jet<double> j = e.jet_at(x0, t, degree);
                 std::vector<std::pair<std::vector<int>, double>> out;
                 for (int i = 0; i < j.size(); ++i)
                     out.emplace_back(j.layout().index(i).entries(), j.coeff(i));
                 return out;
             },
             py::arg("x0"), py::arg("t"), py::arg("degree"))
        .def("__add__", &Expression::operator+)
        .def("__sub__", &Expression::operator-)
        .def("__mul__", &Expression::operator*)
        .def("__truediv__", &Expression::operator/)
        .def("__pow__", &Expression::pow);

    m.def("parse", &parse_expression, py::arg("text"), py::arg("dim") = 1);

    py::class_<VectorField>(m, "VectorField")
        .def(py::init(&make_field), py::arg("dim"), py::arg("components"))
        .def_readonly("dim", &VectorField::dim)
        .def("depends_on_time", &VectorField::depends_on_time);

    m.def("apply_derivation",
          py::overload_cast<const VectorField&, const Expression&>(&apply_derivation),
          py::arg("field"), py::arg("observable"));

    py::class_<TimeInterval>(m, "TimeInterval")
        .def(py::init<double, double>())
        .def_readonly("t_start", &TimeInterval::t_start)
        .def_readonly("t_end", &TimeInterval::t_end);

    py::class_<StepField>(m, "StepField")
        .def_static("autonomous", &StepField::autonomous, py::arg("field"),
                    py::arg("interval"))
        .def_static("from_json", &field_from_json_str, py::arg("text"))
        .def("to_json",
             [](const StepField& X) { return dump_deterministic(stepfield_to_json(X)); })
        .def_readonly("dim", &StepField::dim)
        .def_readonly("breakpoints", &StepField::breakpoints)
        .def("piece_count", &StepField::piece_count);

    m.def("simple_approximate", &simple_approximate, py::arg("field"), py::arg("interval"),
          py::arg("pieces"), py::arg("rule") = FreezeRule::Midpoint);

    py::enum_<FreezeRule>(m, "FreezeRule")
        .value("Midpoint", FreezeRule::Midpoint)
        .value("Left", FreezeRule::Left);

    py::class_<CompactBox>(m, "CompactBox")
        .def(py::init<std::vector<double>, std::vector<double>, int>(), py::arg("lo"),
             py::arg("hi"), py::arg("grid") = 33)
        .def_readonly("lo", &CompactBox::lo)
        .def_readonly("hi", &CompactBox::hi)
        .def_readonly("grid", &CompactBox::grid);

    py::class_<Polydisc>(m, "Polydisc")
        .def(py::init<CompactBox, double, int>(), py::arg("center"), py::arg("radius"),
             py::arg("angles") = 0)
        .def_readonly("radius", &Polydisc::radius);

    py::class_<WeightSequence>(m, "WeightSequence")
        .def_static("geometric", &WeightSequence::geometric, py::arg("d"), py::arg("ratio"),
                    py::arg("max_order"))
        .def("at", &WeightSequence::at)
        .def("weight", &WeightSequence::weight)
        .def("lift_a", &WeightSequence::lift_a)
        .def("lift_b", &WeightSequence::lift_b)
        .def_property_readonly("bound", &WeightSequence::bound)
        .def_property_readonly("max_order", &WeightSequence::max_order);

    py::class_<SeminormValue>(m, "SeminormValue")
        .def_property_readonly("value", &SeminormValue::value)
        .def_readonly("computed_sup", &SeminormValue::computed_sup)
        .def_readonly("achieved_order", &SeminormValue::achieved_order)
        .def_readonly("achieved_at", &SeminormValue::achieved_at)
        .def_readonly("rigorous", &SeminormValue::rigorous)
        .def("to_json", [](const SeminormValue& v) { return dump_deterministic(to_json(v)); });

    m.def(
        "seminorm_function",
        [](const Expression& f, const CompactBox& K, const WeightSequence& a, double t,
           std::optional<Polydisc> majorant) {
            SeminormOptions opts;
            opts.majorant = std::move(majorant);
            return seminorm_function(f, K, a, t, opts);
        },
        py::arg("f"), py::arg("box"), py::arg("weights"), py::arg("t") = 0.0,
        py::arg("majorant") = std::nullopt);
    m.def(
        "seminorm_field",
        [](const VectorField& X, const CompactBox& K, const WeightSequence& a, double t) {
            return seminorm_field(X, K, a, t);
        },
        py::arg("field"), py::arg("box"), py::arg("weights"), py::arg("t") = 0.0);
    m.def("holo_supnorm", &holo_supnorm, py::arg("f"), py::arg("polydisc"),
          py::arg("t") = 0.0, py::arg("safety") = 1.05);
    m.def("check_derivation_bound",
          [](const VectorField& X, const Expression& f, const CompactBox& K,
             const WeightSequence& a, int n, double t) {
              auto r = check_derivation_bound(X, f, K, a, n, t);
              return py::make_tuple(r.lhs, r.rhs, r.holds);
          },
          py::arg("field"), py::arg("f"), py::arg("box"), py::arg("weights"), py::arg("n"),
          py::arg("t") = 0.0);

    m.def("radius_at", &radius_at, py::arg("f"), py::arg("x0"), py::arg("t") = 0.0,
          py::arg("fit_order") = 24);

    py::class_<FlowCertificate>(m, "FlowCertificate")
        .def_property_readonly("subinterval_count",
                               [](const FlowCertificate& c) {
                                   return c.subintervals.size();
                               })
        .def("total_tail", &FlowCertificate::total_tail)
        .def("residual_bound", &FlowCertificate::residual_bound)
        .def("to_json",
             [](const FlowCertificate& c) { return dump_deterministic(to_json(c)); });

    m.def(
        "certify",
        [](const StepField& X, const TimeInterval& T, const CompactBox& K, const Polydisc& V,
           const Expression& f, double target_tail) {
            CertifyOptions opts;
            opts.target_tail = target_tail;
            return certify(X, T, K, V, f, opts);
        },
        py::arg("field"), py::arg("interval"), py::arg("box"), py::arg("polydisc"),
        py::arg("observable"), py::arg("target_tail") = 1e-9);

    m.def("flow_eval",
          [](const StepField& X, double t0, double t, const std::vector<double>& x0,
             const FlowCertificate& cert) {
              FlowResult r = flow_eval(X, t0, t, x0, cert);
              return py::make_tuple(r.point, r.residual_bound);
          },
          py::arg("field"), py::arg("t0"), py::arg("t"), py::arg("x0"),
          py::arg("certificate"));

    m.def("lie_series_apply", &lie_series_apply, py::arg("field"), py::arg("dt"),
          py::arg("observable"), py::arg("order"));

    m.def("rk4_flow", &rk4_flow, py::arg("field"), py::arg("t0"), py::arg("t"),
          py::arg("x0"), py::arg("steps"));

    m.def("run_paper_examples", []() {
        Json out = Json::array();
        for (const auto& rep : run_paper_examples()) out.push_back(to_json(rep));
        return dump_deterministic(out);
    });

    m.attr("__version__") = "0.1.0";
}
