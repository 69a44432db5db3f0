#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "qoptics/checks.hpp"
#include "qoptics/cli.hpp"
#include "qoptics/io.hpp"
#include "qoptics/scheme.hpp"

namespace py = pybind11;
using namespace qoptics;

namespace {

const char *kind_name(OutputRequest::Kind k) {
    switch (k) {
    case OutputRequest::Kind::wigner: return "wigner";
    case OutputRequest::Kind::fidelity: return "fidelity";
    case OutputRequest::Kind::probs: return "probs";
    case OutputRequest::Kind::state: return "state";
    }
    return "";
}

nlohmann::json output_json(const OutputResult &o) {
    nlohmann::json j = {{"kind", kind_name(o.request.kind)}};
    if (!o.request.mode.empty())
        j["mode"] = o.request.mode;
    std::visit(
        [&](const auto &v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>)
                j["value"] = v;
            else if constexpr (std::is_same_v<V, WignerGrid>)
                j["value"] = wigner_to_json(v);
            else if constexpr (std::is_same_v<V, ProbabilityReport>)
                j["value"] = probabilities_to_json(v);
            else
                j["value"] = state_to_json(v);
        },
        o.value);
    return j;
}

std::string run_text(const std::string &text, std::optional<int> cutoff, double leak_budget) {
    const ParseResult parsed = parse_circuit(text);
    if (!parsed.ok()) {
        std::string msg;
        for (const auto &e : parsed.errors)
            msg += e.format() + "\n";
        throw ParameterError(msg);
    }
    const ExecutionResult r = run_circuit(*parsed.spec, CutoffPolicy{cutoff, leak_budget});
    nlohmann::json j = {{"cutoff", r.cutoff}, {"max_leak", r.max_leak},
                        {"herald_weight", r.herald_weight}};
    nlohmann::json outs = nlohmann::json::array();
    for (const auto &o : r.outputs)
        outs.push_back(output_json(o));
    j["outputs"] = outs;
    return j.dump();
}

py::dict branch_dict(const BranchResult &b) {
    py::dict d;
    d["state"] = b.state.matrix();
    d["weight"] = b.weight;
    d["fidelity_to_input"] = b.fidelity_to_input;
    d["fidelity_to_attenuated"] = b.fidelity_to_attenuated;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<LeakBudgetError>(m, "LeakBudgetError", base.ptr());
    py::register_exception<ZeroProbabilityError>(m, "ZeroProbabilityError", base.ptr());

    py::class_<InputSpec>(m, "InputSpec")
        .def_static("vacuum", &InputSpec::make_vacuum)
        .def_static("coherent", &InputSpec::coherent, py::arg("alpha"))
        .def_static("thermal", &InputSpec::thermal, py::arg("nbar"))
        .def_static("fock", &InputSpec::fock, py::arg("n"))
        .def_readonly("alpha", &InputSpec::alpha)
        .def_readonly("nbar", &InputSpec::nbar)
        .def_readonly("n", &InputSpec::n)
        .def("suggested_cutoff", &InputSpec::suggested_cutoff);

    py::enum_<Branch>(m, "Branch").value("pd1", Branch::pd1).value("pd2", Branch::pd2);

    py::class_<SchemeParams>(m, "SchemeParams")
        .def(py::init<>())
        .def_readwrite("input", &SchemeParams::input)
        .def_readwrite("T", &SchemeParams::T)
        .def_readwrite("s", &SchemeParams::s)
        .def_readwrite("eta_pd0", &SchemeParams::eta_pd0)
        .def_readwrite("eta_pd1", &SchemeParams::eta_pd1)
        .def_readwrite("eta_pd2", &SchemeParams::eta_pd2)
        .def_readwrite("pd0_onoff", &SchemeParams::pd0_onoff)
        .def_readwrite("pd12_onoff", &SchemeParams::pd12_onoff)
        .def_readwrite("flip_bs3", &SchemeParams::flip_bs3)
        .def_property(
            "cutoff", [](const SchemeParams &p) { return p.cutoff.fixed; },
            [](SchemeParams &p, std::optional<int> d) { p.cutoff.fixed = d; })
        .def_property(
            "leak_budget", [](const SchemeParams &p) { return p.cutoff.leak_budget; },
            [](SchemeParams &p, double b) { p.cutoff.leak_budget = b; })
        .def("validate", &SchemeParams::validate);

    m.def("run_interferometer", [](const SchemeParams &p) {
        const SchemeResult r = run_interferometer(p);
        py::dict d;
        d["pd1"] = branch_dict(r.pd1);
        d["pd2"] = branch_dict(r.pd2);
        d["p_pd0"] = r.p_pd0;
        d["p_b"] = r.p_b;
        d["p_c"] = r.p_c;
        d["p_bc"] = r.p_bc;
        d["p_bc_given_b"] = r.p_bc_given_b;
        d["p_bc_given_c"] = r.p_bc_given_c;
        d["cutoff"] = r.cutoff;
        d["leak"] = r.leak;
        return d;
    }, py::arg("params"));

    m.def("branch_wigner", [](const SchemeParams &p, Branch b, double lo, double hi, int n) {
        const Axis axis(lo, hi, n);
        const WignerGrid g = branch_wigner(p, b, axis, axis);
        return g.values;
    }, py::arg("params"), py::arg("branch"), py::arg("lo") = -3.0, py::arg("hi") = 3.0,
       py::arg("n") = 81);

    m.def("commutation_report", [](const SchemeParams &p, const std::vector<double> &alphas) {
        py::list rows;
        for (const auto &r : commutation_report(p, alphas)) {
            py::dict d;
            d["alpha"] = r.alpha;
            d["f_input"] = r.f_input;
            d["f_attenuated"] = r.f_attenuated;
            d["f_predicted"] = r.f_predicted;
            d["f_oracle"] = r.f_oracle;
            d["p_bc_given_b"] = r.p_bc_given_b;
            d["p_bc_given_c"] = r.p_bc_given_c;
            d["pd1_wigner_min"] = r.pd1_wigner_min;
            d["weight_ratio"] = r.weight_ratio;
            d["expected_ratio"] = r.expected_ratio;
            rows.append(d);
        }
        return rows;
    }, py::arg("params"), py::arg("alphas"));

    m.def("gaussian_wigner", [](const std::string &kind, std::complex<double> param, std::complex<double> beta) {
        GaussianKind k = GaussianKind::coherent;
        if (kind == "thermal")
            k = GaussianKind::thermal;
        else if (kind != "coherent")
            throw ParameterError("kind must be coherent or thermal");
        return gaussian_wigner_oracle(k, param, beta);
    }, py::arg("kind"), py::arg("param"), py::arg("beta"));

    m.def("_run_circuit_json", &run_text, py::arg("text"), py::arg("cutoff") = std::nullopt,
          py::arg("leak_budget") = 1e-6);

    m.def("format_circuit", [](const std::string &text) {
        const ParseResult parsed = parse_circuit(text);
        if (!parsed.ok())
            throw ParameterError(parsed.errors.front().format());
        return print_circuit(*parsed.spec);
    }, py::arg("text"));

    m.def("parse_errors", [](const std::string &text) {
        py::list out;
        for (const auto &e : parse_circuit(text).errors)
            out.append(py::make_tuple(e.line, e.column, std::string(to_string(e.code)), e.message));
        return out;
    }, py::arg("text"));

    m.def("commutator_defect", &commutator_defect, py::arg("d"));
    m.def("beam_splitter_conjugation_defect", &beam_splitter_conjugation_defect,
          py::arg("T"), py::arg("d"));
    m.def("squeezer_conjugation_defect", &squeezer_conjugation_defect, py::arg("s"), py::arg("d"));
    m.def("hom_defect", &hom_defect, py::arg("d") = 4);

    m.def("cli", [](const std::vector<std::string> &args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"));
}
