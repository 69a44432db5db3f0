#include "qoptics/scheme.hpp"

#include <cmath>

#include "qoptics/elements.hpp"

namespace qoptics {

namespace {

HeraldStatement pd0_herald(const SchemeParams &p) {
    if (p.pd0_onoff)
        return {"d", Requirement::click(), DetectorModel::on_off(p.eta_pd0)};
    return {"d", Requirement::exactly(1), DetectorModel::resolving(p.eta_pd0)};
}

CircuitSpec fig1_head(const SchemeParams &p) {
    p.validate();
    CircuitSpec spec;
    spec.modes = {"a", "b", "c", "d"};
    spec.inputs = {{"a", p.input},
                   {"b", InputSpec::make_vacuum()},
                   {"c", InputSpec::make_vacuum()},
                   {"d", InputSpec::make_vacuum()}};
    spec.statements.emplace_back(BeamSplitterStatement{"a", "b", p.T});
    spec.statements.emplace_back(SqueezerStatement{"a", "d", p.s});
    spec.statements.emplace_back(pd0_herald(p));
    spec.statements.emplace_back(BeamSplitterStatement{"a", "c", p.T});
    if (p.flip_bs3)
        spec.statements.emplace_back(BeamSplitterStatement{"b", "c", 0.5});
    else
        spec.statements.emplace_back(BeamSplitterStatement{"c", "b", 0.5});
    return spec;
}

HeraldStatement port_herald(const std::string &mode, bool fires, double eta,
                            bool onoff) {
    if (onoff)
        return {mode, fires ? Requirement::click() : Requirement::no_click(),
                DetectorModel::on_off(eta)};
    return {mode, fires ? Requirement::exactly(1) : Requirement::no_click(),
            DetectorModel::resolving(eta)};
}

BranchResult branch_result(const SchemeParams &p, const ExecutionResult &run) {
    MixedState rho = run.final_state.reduced({"a"});
    const double w = rho.weight();
    const double f_in = input_fidelity(p.input, rho);
    const double f_att = input_fidelity(attenuated_input(p), rho);
    return {std::move(rho), w, f_in, f_att};
}

ExecutionResult run_branch(const SchemeParams &p, Branch b,
                           std::optional<int> cutoff = std::nullopt) {
    CutoffPolicy policy = p.cutoff;
    if (cutoff)
        policy.fixed = cutoff;
    return run_circuit(build_fig1_circuit(p, b), policy);
}

/// Pure reference state of a non-thermal input.
PureState pure_input(const SchemeParams &p, Cutoff cutoff) {
    switch (p.input.kind) {
    case InputSpec::Kind::coherent: return coherent_state(p.input.alpha, cutoff);
    case InputSpec::Kind::fock: return fock_state(p.input.n, cutoff);
    case InputSpec::Kind::vacuum: return vacuum(cutoff);
    case InputSpec::Kind::thermal: break;
    }
    throw ParameterError("thermal input has no pure reference");
}

double pair_probability(const ProbabilityReport &probs, const std::string &x,
                        const std::string &y) {
    for (const auto &pair : probs.click_pairs)
        if ((pair.first == x && pair.second == y) ||
            (pair.first == y && pair.second == x))
            return pair.probability;
    throw UnknownModeError("no click pair (" + x + ", " + y + ")");
}

double geometric(double nbar, int n) {
    return std::pow(nbar / (nbar + 1.0), n) / (nbar + 1.0);
}

void normalize_in_place(std::vector<double> &v) {
    double s = 0.0;
    for (double x : v)
        s += x;
    if (s > 0.0)
        for (double &x : v)
            x /= s;
}

ConditionalStatistics conditional_statistics(const CircuitSpec &spec,
                                             const CutoffPolicy &policy,
                                             auto predicted, auto exact) {
    const ExecutionResult run = run_circuit(spec, policy);
    ConditionalStatistics st;
    st.measured = run.final_state.number_distribution("a");
    normalize_in_place(st.measured);
    const int d = run.cutoff;
    for (int m = 0; m < d; ++m) {
        st.predicted.push_back(predicted(m));
        st.exact.push_back(exact(m));
    }
    normalize_in_place(st.predicted);
    normalize_in_place(st.exact);
    return st;
}

} // namespace

void SchemeParams::validate() const {
    if (!(T > 0.0 && T < 1.0))
        throw ParameterError("T must lie in (0, 1)");
    if (!(s > 0.0) || !std::isfinite(s))
        throw ParameterError("squeezer coupling s must be positive");
    for (double eta : {eta_pd0, eta_pd1, eta_pd2})
        if (!(eta > 0.0 && eta <= 1.0))
            throw ParameterError("detector efficiencies must lie in (0, 1]");
    if (input.kind == InputSpec::Kind::thermal && !(input.nbar >= 0.0))
        throw ParameterError("thermal mean photon number must be non-negative");
    if (input.kind == InputSpec::Kind::fock && input.n < 0)
        throw ParameterError("Fock level must be non-negative");
}

std::string_view to_string(Branch b) { return b == Branch::pd1 ? "pd1" : "pd2"; }

CircuitSpec build_fig1_circuit(const SchemeParams &params, Branch branch) {
    CircuitSpec spec = fig1_head(params);
    const bool pd1 = branch == Branch::pd1;
    spec.statements.emplace_back(
        port_herald("b", pd1, params.eta_pd1, params.pd12_onoff));
    spec.statements.emplace_back(
        port_herald("c", !pd1, params.eta_pd2, params.pd12_onoff));
    OutputRequest fid;
    fid.kind = OutputRequest::Kind::fidelity;
    fid.mode = "a";
    spec.outputs = {fid, OutputRequest{}};
    return spec;
}

CircuitSpec build_fig1_prefix(const SchemeParams &params) {
    CircuitSpec spec = fig1_head(params);
    spec.outputs = {OutputRequest{}};
    return spec;
}

InputSpec attenuated_input(const SchemeParams &params) {
    const double t = std::sqrt(params.T);
    if (params.input.kind == InputSpec::Kind::coherent)
        return InputSpec::coherent(t * params.input.alpha);
    if (params.input.kind == InputSpec::Kind::thermal)
        return InputSpec::thermal(params.T * params.input.nbar);
    return params.input;
}

SchemeResult run_interferometer(const SchemeParams &params) {
    params.validate();
    // The prefix fixes the cutoff so both branches share it.
    const ExecutionResult prefix = run_circuit(build_fig1_prefix(params), params.cutoff);
    const int d = prefix.cutoff;
    const ExecutionResult r1 = run_branch(params, Branch::pd1, d);
    const ExecutionResult r2 = run_branch(params, Branch::pd2, d);

    const auto &probs = std::get<ProbabilityReport>(prefix.outputs.front().value);
    SchemeResult out{branch_result(params, r1),
                     branch_result(params, r2),
                     prefix.heralds.front().probability,
                     probs.click.at("b"),
                     probs.click.at("c"),
                     pair_probability(probs, "b", "c"),
                     0.0,
                     0.0,
                     d,
                     std::max({prefix.max_leak, r1.max_leak, r2.max_leak})};
    out.p_bc_given_b = out.p_b > 0.0 ? out.p_bc / out.p_b : 0.0;
    out.p_bc_given_c = out.p_c > 0.0 ? out.p_bc / out.p_c : 0.0;
    return out;
}

OracleBranches analytic_branch_oracle(const PureState &input,
                                      const SchemeParams &params) {
    if (input.space().num_modes() != 1)
        throw DimensionError("oracle input must be a single mode");
    const SqueezerParams sq(params.s, "a", "d");
    const double r = std::sqrt(1.0 - params.T);
    const double scale = sq.lambda() * r / std::sqrt(2.0);
    const Vector &phi = input.amplitudes();
    Vector comm(phi.size()), anti(phi.size());
    for (Eigen::Index n = 0; n < phi.size(); ++n) {
        const double up = static_cast<double>(n + 1);
        const double down = static_cast<double>(n);
        comm[n] = scale * (up - down) * phi[n];
        anti[n] = -scale * (up + down) * phi[n];
    }
    return {PureState(input.space(), std::move(comm)),
            PureState(input.space(), std::move(anti))};
}

std::vector<CommutationRow> commutation_report(const SchemeParams &base,
                                               const std::vector<double> &alphas) {
    std::vector<CommutationRow> rows;
    const double t = std::sqrt(base.T);
    for (double alpha : alphas) {
        SchemeParams p = base;
        p.input = InputSpec::coherent(alpha);
        const SchemeResult res = run_interferometer(p);
        const Cutoff cutoff(res.cutoff);
        const auto oracle = analytic_branch_oracle(pure_input(p, cutoff), p);
        const double x = alpha * alpha;
        CommutationRow row;
        row.alpha = alpha;
        row.f_input = res.pd2.fidelity_to_input;
        row.f_attenuated = res.pd2.fidelity_to_attenuated;
        row.f_predicted = std::exp(-(1.0 - t) * (1.0 - t) * x);
        row.f_oracle = fidelity(oracle.commutator, res.pd2.state);
        row.p_bc_given_b = res.p_bc_given_b;
        row.p_bc_given_c = res.p_bc_given_c;
        row.pd1_wigner_min = min_wigner(wigner(res.pd1.state, Axis(), Axis())).value;
        row.weight_ratio = res.pd1.weight / res.pd2.weight;
        row.expected_ratio = 1.0 + 8.0 * x + 4.0 * x * x;
        rows.push_back(row);
    }
    return rows;
}

Degradation efficiency_degradation(const SchemeParams &params, double eta) {
    if (!(eta > 0.0 && eta <= 1.0))
        throw ParameterError("efficiency must lie in (0, 1]");
    SchemeParams ideal = params;
    ideal.eta_pd1 = ideal.eta_pd2 = 1.0;
    ideal.pd12_onoff = false;
    SchemeParams lossy = params;
    lossy.eta_pd1 = lossy.eta_pd2 = eta;
    lossy.pd12_onoff = true;

    const ExecutionResult ri = run_branch(ideal, Branch::pd2);
    const ExecutionResult rl = run_branch(lossy, Branch::pd2, ri.cutoff);
    const double fi = branch_result(ideal, ri).fidelity_to_input;
    const double fl = branch_result(lossy, rl).fidelity_to_input;
    return {fi, fl, (fi - fl) / fi};
}

WignerGrid branch_wigner(const SchemeParams &params, Branch branch,
                         const Axis &re, const Axis &im) {
    CircuitSpec spec = build_fig1_circuit(params, branch);
    spec.outputs = {{OutputRequest::Kind::wigner, "a", re}};
    const ExecutionResult r = run_circuit(spec, params.cutoff);
    if (re == im)
        return std::get<WignerGrid>(r.outputs.front().value);
    return wigner(r.final_state.reduced({"a"}), re, im);
}

ConditionalStatistics subtraction_statistics(double nbar, double T,
                                             const CutoffPolicy &policy) {
    CircuitSpec spec;
    spec.modes = {"a", "b"};
    spec.inputs = {{"a", InputSpec::thermal(nbar)}, {"b", InputSpec::make_vacuum()}};
    spec.statements.emplace_back(BeamSplitterStatement{"a", "b", T});
    spec.statements.emplace_back(
        HeraldStatement{"b", Requirement::exactly(1), DetectorModel::ideal()});
    spec.outputs = {OutputRequest{}};
    return conditional_statistics(
        spec, policy, [&](int m) { return (m + 1) * geometric(nbar, m + 1); },
        [&](int m) { return (m + 1) * std::pow(T, m) * geometric(nbar, m + 1); });
}

ConditionalStatistics addition_statistics(double nbar, double s,
                                          const CutoffPolicy &policy) {
    CircuitSpec spec;
    spec.modes = {"a", "d"};
    spec.inputs = {{"a", InputSpec::thermal(nbar)}, {"d", InputSpec::make_vacuum()}};
    spec.statements.emplace_back(SqueezerStatement{"a", "d", s});
    spec.statements.emplace_back(
        HeraldStatement{"d", Requirement::exactly(1), DetectorModel::ideal()});
    spec.outputs = {OutputRequest{}};
    const double mu2 = std::cosh(s) * std::cosh(s);
    return conditional_statistics(
        spec, policy,
        [&](int m) { return m == 0 ? 0.0 : m * geometric(nbar, m - 1); },
        [&](int m) {
            return m == 0 ? 0.0
                          : m * std::pow(mu2, -(m - 1)) * geometric(nbar, m - 1);
        });
}

} // namespace qoptics
