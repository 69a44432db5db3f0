#include "qoptics/executor.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "detail/layout.hpp"
#include "qoptics/diagnostics.hpp"
#include "qoptics/elements.hpp"

namespace qoptics {

using detail::layout_of;
using detail::SubsetLayout;

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i)
        r *= base;
    return r;
}

std::size_t mode_index(const CircuitSpec &spec, const std::string &mode) {
    const auto it = std::find(spec.modes.begin(), spec.modes.end(), mode);
    return static_cast<std::size_t>(it - spec.modes.begin());
}

std::size_t input_index(const CircuitSpec &spec, const std::string &mode) {
    for (std::size_t i = 0; i < spec.inputs.size(); ++i)
        if (spec.inputs[i].mode == mode)
            return i;
    throw UnknownModeError("mode '" + mode + "' has no input");
}

/// Mixture components of an input: one vector for pure inputs, one per
/// populated level for a thermal state.
std::vector<Vector> input_components(const InputSpec &in, Cutoff cutoff) {
    switch (in.kind) {
    case InputSpec::Kind::vacuum:
        return {vacuum(cutoff).amplitudes()};
    case InputSpec::Kind::fock:
        return {fock_state(in.n, cutoff).amplitudes()};
    case InputSpec::Kind::coherent:
        return {coherent_state(in.alpha, cutoff).amplitudes()};
    case InputSpec::Kind::thermal: {
        const MixedState th = thermal_state(in.nbar, cutoff);
        std::vector<Vector> out;
        for (int n = 0; n < cutoff.dim(); ++n) {
            const double p = th.matrix()(n, n).real();
            if (p <= 0.0)
                continue;
            Vector v = Vector::Zero(cutoff.dim());
            v[n] = std::sqrt(p);
            out.push_back(std::move(v));
        }
        return out;
    }
    }
    return {};
}

double input_tail(const InputSpec &in, Cutoff cutoff) {
    switch (in.kind) {
    case InputSpec::Kind::coherent: return coherent_tail(in.alpha, cutoff);
    case InputSpec::Kind::thermal: return thermal_tail(in.nbar, cutoff);
    case InputSpec::Kind::fock: return in.n >= cutoff.dim() ? 1.0 : 0.0;
    case InputSpec::Kind::vacuum: return 0.0;
    }
    return 0.0;
}

OperatorMatrix unitary_of(const Statement &st, Cutoff cutoff) {
    if (const auto *bs = std::get_if<BeamSplitterStatement>(&st))
        return beam_splitter_unitary(
            BeamSplitterParams(bs->T, bs->transmitted, bs->reflected), cutoff);
    const auto &sq = std::get<SqueezerStatement>(st);
    return two_mode_squeezer_unitary(SqueezerParams(sq.s, sq.signal, sq.idler),
                                     cutoff);
}

class Runner {
  public:
    Runner(const ExecutionPlan &plan, WignerEngine engine)
        : plan_(plan), spec_(plan.spec), cutoff_(plan.cutoff), engine_(engine),
          ens_({}, cutoff_) {}

    ExecutionResult run() {
        std::vector<OutputResult> outputs;
        for (const auto &step : plan_.steps) {
            switch (step.kind) {
            case PlanStep::Kind::prepare: prepare(step); break;
            case PlanStep::Kind::unitary: unitary(step); break;
            case PlanStep::Kind::condition: condition(step); break;
            case PlanStep::Kind::trace: trace(step); break;
            case PlanStep::Kind::output: outputs.push_back(output(step)); break;
            }
        }
        ExecutionResult r{cutoff_.dim(), leak(), ens_.weight(), heralds_, ens_,
                          std::move(outputs)};
        return r;
    }

  private:
    double leak() const { return step_leak_ + tail_; }

    void check_leak(const std::vector<std::string> &modes) {
        for (const auto &m : modes)
            step_leak_ = std::max(step_leak_, ens_.top_level_fraction(m));
        if (leak() > plan_.leak_budget) {
            std::ostringstream msg;
            msg << "truncation leak " << leak() << " exceeds budget "
                << plan_.leak_budget << " at cutoff " << cutoff_.dim()
                << "; rerun with a larger cutoff";
            throw LeakBudgetError(msg.str(), leak(), plan_.leak_budget,
                                  cutoff_.dim());
        }
    }

    void prepare(const PlanStep &step) {
        const auto &in = spec_.inputs[step.source];
        tail_ += input_tail(in.input, cutoff_);
        if (in.input.kind == InputSpec::Kind::fock && in.input.n >= cutoff_.dim())
            check_leak({});
        ens_.join(in.mode, input_components(in.input, cutoff_));
        check_leak({in.mode});
    }

    void unitary(const PlanStep &step) {
        const OperatorMatrix op = unitary_of(spec_.statements[step.source], cutoff_);
        ens_.apply(op);
        check_leak(op.acting_modes());
    }

    void condition(const PlanStep &step) {
        const auto &h = std::get<HeraldStatement>(spec_.statements[step.source]);
        const double before = ens_.weight();
        ens_.condition(h.mode, outcome_diagonal(h.requirement, h.detector, cutoff_));
        const double after = ens_.weight();
        if (!(after > 1e-28 * before) || !(after > 0.0))
            throw ZeroProbabilityError("herald on mode '" + h.mode +
                                       "' has zero probability");
        heralds_.push_back({h.mode, after / before});
    }

    void trace(const PlanStep &step) {
        ens_.trace(spec_.modes[step.modes.at(0)]);
        check_leak(ens_.modes());
    }

    std::vector<std::string> surviving() const {
        std::vector<std::string> out;
        for (const auto &m : spec_.modes)
            if (std::find(ens_.modes().begin(), ens_.modes().end(), m) !=
                ens_.modes().end())
                out.push_back(m);
        return out;
    }

    OutputResult output(const PlanStep &step) {
        const OutputRequest &req = spec_.outputs[step.source];
        switch (req.kind) {
        case OutputRequest::Kind::wigner:
            return {req, wigner(ens_.reduced({req.mode}), req.axis, req.axis,
                                engine_)};
        case OutputRequest::Kind::fidelity:
            return {req, input_fidelity(spec_.input_of(req.mode),
                                        ens_.reduced({req.mode}))};
        case OutputRequest::Kind::probs: return {req, probabilities()};
        case OutputRequest::Kind::state: {
            const auto order = surviving();
            if (ens_.is_pure())
                return {req, FinalState(permute_modes(ens_.pure(), order))};
            return {req, FinalState(ens_.reduced(order))};
        }
        }
        throw Error("unknown output kind");
    }

    ProbabilityReport probabilities() const {
        ProbabilityReport rep;
        const double w = ens_.weight();
        rep.herald_weight = w;
        rep.heralds = heralds_;
        const auto order = surviving();
        const auto on = DetectorModel::on_off(1.0);
        for (const auto &m : order) {
            auto dist = ens_.number_distribution(m);
            for (auto &p : dist)
                p /= w;
            rep.click[m] = ens_.pattern_probability(
                               HeraldPattern({{m, Requirement::click(), on}})) /
                           w;
            rep.marginals[m] = std::move(dist);
        }
        for (std::size_t i = 0; i < order.size(); ++i)
            for (std::size_t j = i + 1; j < order.size(); ++j)
                rep.click_pairs.push_back(
                    {order[i], order[j],
                     ens_.pattern_probability(HeraldPattern(
                         {{order[i], Requirement::click(), on},
                          {order[j], Requirement::click(), on}})) /
                         w});
        return rep;
    }

    const ExecutionPlan &plan_;
    const CircuitSpec &spec_;
    Cutoff cutoff_;
    WignerEngine engine_;
    Ensemble ens_;
    std::vector<HeraldRecord> heralds_;
    double step_leak_ = 0.0;
    double tail_ = 0.0;
};

} // namespace

int CutoffPolicy::resolve(const CircuitSpec &spec) const {
    if (fixed)
        return *fixed;
    int d = 12;
    for (const auto &in : spec.inputs)
        d = std::max(d, in.input.suggested_cutoff());
    const bool wants_wigner =
        std::any_of(spec.outputs.begin(), spec.outputs.end(), [](const OutputRequest &o) {
            return o.kind == OutputRequest::Kind::wigner;
        });
    while (wants_wigner && d < kWignerMinCutoff)
        d *= 2;
    return d;
}

std::string_view to_string(PlanStep::Kind kind) {
    switch (kind) {
    case PlanStep::Kind::prepare: return "prepare";
    case PlanStep::Kind::unitary: return "unitary";
    case PlanStep::Kind::condition: return "condition";
    case PlanStep::Kind::trace: return "trace";
    case PlanStep::Kind::output: return "output";
    }
    return "unknown";
}

ExecutionPlan compile(const CircuitSpec &spec, const CutoffPolicy &policy) {
    const auto errors = validate(spec);
    if (!errors.empty())
        throw ParameterError("invalid circuit: " + errors.front().format());
    if (!(policy.leak_budget > 0.0))
        throw ParameterError("leak budget must be positive");

    ExecutionPlan plan;
    plan.spec = spec;
    plan.cutoff = policy.resolve(spec);
    Cutoff(plan.cutoff);
    plan.leak_budget = policy.leak_budget;
    plan.may_double = !policy.fixed.has_value();

    std::set<std::string> prepared, touched;
    auto ensure = [&](const std::string &m) {
        if (prepared.insert(m).second)
            plan.steps.push_back({PlanStep::Kind::prepare, {mode_index(spec, m)},
                                  input_index(spec, m)});
    };

    for (std::size_t i = 0; i < spec.statements.size(); ++i) {
        const Statement &st = spec.statements[i];
        if (const auto *h = std::get_if<HeraldStatement>(&st)) {
            if (!touched.count(h->mode))
                plan.warnings.push_back("herald on mode '" + h->mode +
                                        "' that no element touches");
            ensure(h->mode);
            const std::size_t m = mode_index(spec, h->mode);
            plan.steps.push_back({PlanStep::Kind::condition, {m}, i});
            plan.steps.push_back({PlanStep::Kind::trace, {m}, i});
            continue;
        }
        std::string m1, m2;
        if (const auto *bs = std::get_if<BeamSplitterStatement>(&st)) {
            m1 = bs->transmitted;
            m2 = bs->reflected;
        } else {
            const auto &sq = std::get<SqueezerStatement>(st);
            m1 = sq.signal;
            m2 = sq.idler;
        }
        ensure(m1);
        ensure(m2);
        touched.insert(m1);
        touched.insert(m2);
        plan.steps.push_back({PlanStep::Kind::unitary,
                              {mode_index(spec, m1), mode_index(spec, m2)},
                              i});
    }

    std::set<std::string> measured;
    for (const auto &st : spec.statements)
        if (const auto *h = std::get_if<HeraldStatement>(&st))
            measured.insert(h->mode);
    for (const auto &m : spec.modes)
        if (!measured.count(m))
            ensure(m);

    for (std::size_t i = 0; i < spec.outputs.size(); ++i) {
        std::vector<std::size_t> modes;
        if (!spec.outputs[i].mode.empty())
            modes.push_back(mode_index(spec, spec.outputs[i].mode));
        plan.steps.push_back({PlanStep::Kind::output, std::move(modes), i});
    }
    return plan;
}

ExecutionResult execute(const ExecutionPlan &plan, WignerEngine engine) {
    return Runner(plan, engine).run();
}

ExecutionResult run_circuit(const CircuitSpec &spec, const CutoffPolicy &policy,
                            WignerEngine engine) {
    const ExecutionPlan plan = compile(spec, policy);
    for (const auto &w : plan.warnings)
        warn(w);
    try {
        return execute(plan, engine);
    } catch (const LeakBudgetError &e) {
        if (!plan.may_double)
            throw;
        std::ostringstream msg;
        msg << "leak budget exceeded at cutoff " << plan.cutoff
            << "; retrying at cutoff " << 2 * plan.cutoff;
        warn(msg.str());
    }
    CutoffPolicy doubled{2 * plan.cutoff, policy.leak_budget};
    return execute(compile(spec, doubled), engine);
}

MixedState input_state(const InputSpec &input, Cutoff cutoff,
                       const std::string &mode) {
    if (input.kind == InputSpec::Kind::thermal)
        return thermal_state(input.nbar, cutoff, mode);
    const auto comps = input_components(input, cutoff);
    return to_mixed(PureState(ModeSpace({mode}, cutoff), comps.front()));
}

double input_fidelity(const InputSpec &input, const MixedState &state) {
    if (state.space().num_modes() != 1)
        throw DimensionError("input fidelity needs a single-mode state");
    const std::string &mode = state.modes().front();
    if (input.kind == InputSpec::Kind::thermal)
        return state_fidelity(input_state(input, state.cutoff(), mode), state);
    const PureState phi(state.space(),
                        input_components(input, state.cutoff()).front());
    return fidelity(phi, state);
}

// ---------------------------------------------------------------------------

Ensemble::Ensemble(std::vector<std::string> modes, Cutoff cutoff)
    : modes_(std::move(modes)), cutoff_(cutoff),
      dim_(ipow(static_cast<std::size_t>(cutoff.dim()), modes_.size())) {
    ModeSpace(modes_, cutoff_);
    if (modes_.empty())
        comps_.push_back(Vector::Ones(1));
}

double Ensemble::weight() const {
    double w = 0.0;
    for (const auto &v : comps_)
        w += v.squaredNorm();
    return w;
}

void Ensemble::join(const std::string &mode, const std::vector<Vector> &local) {
    if (std::find(modes_.begin(), modes_.end(), mode) != modes_.end())
        throw DimensionError("mode '" + mode + "' is already live");
    const auto d = static_cast<Eigen::Index>(cutoff_.dim());
    const auto old = static_cast<Eigen::Index>(dim_);
    std::vector<Vector> next;
    next.reserve(comps_.size() * local.size());
    for (const auto &u : local) {
        if (u.size() != d)
            throw DimensionError("joined mode vector has the wrong dimension");
        for (const auto &v : comps_) {
            Vector w(old * d);
            for (Eigen::Index n = 0; n < d; ++n)
                w.segment(n * old, old) = u[n] * v;
            next.push_back(std::move(w));
        }
    }
    modes_.push_back(mode);
    dim_ *= static_cast<std::size_t>(d);
    comps_ = std::move(next);
    if (comps_.size() > dim_)
        compact();
}

void Ensemble::apply(const OperatorMatrix &op) {
    if (!(op.cutoff() == cutoff_))
        throw DimensionError("operator cutoff does not match the ensemble");
    const SubsetLayout lay = layout_of(space(), op.acting_modes());
    for (auto &v : comps_)
        detail::apply_in_place(op.matrix(), lay, v);
}

void Ensemble::condition(const std::string &mode, const std::vector<double> &diag) {
    const ModeSpace sp = space();
    const std::size_t stride = sp.stride(sp.position(mode));
    const auto d = static_cast<std::size_t>(cutoff_.dim());
    if (diag.size() != d)
        throw DimensionError("POVM diagonal has the wrong dimension");
    std::vector<double> scale(d);
    for (std::size_t n = 0; n < d; ++n)
        scale[n] = std::sqrt(std::max(diag[n], 0.0));
    for (auto &v : comps_)
        for (Eigen::Index i = 0; i < v.size(); ++i)
            v[i] *= scale[(static_cast<std::size_t>(i) / stride) % d];
}

void Ensemble::trace(const std::string &mode) {
    const ModeSpace sp = space();
    const SubsetLayout lay = layout_of(sp, {mode});
    const double floor = 1e-30 * weight();
    const auto nr = static_cast<Eigen::Index>(lay.rest.size());
    std::vector<Vector> next;
    for (const auto &v : comps_)
        for (std::size_t off : lay.local) {
            Vector w(nr);
            for (Eigen::Index k = 0; k < nr; ++k)
                w[k] = v[static_cast<Eigen::Index>(lay.rest[k] + off)];
            const double n2 = w.squaredNorm();
            if (n2 > floor && n2 > 0.0)
                next.push_back(std::move(w));
        }
    modes_.erase(std::find(modes_.begin(), modes_.end(), mode));
    dim_ /= static_cast<std::size_t>(cutoff_.dim());
    comps_ = std::move(next);
    if (comps_.size() > dim_)
        compact();
}

void Ensemble::compact() {
    if (comps_.size() <= dim_)
        return;
    const auto n = static_cast<Eigen::Index>(dim_);
    Matrix rho = Matrix::Zero(n, n);
    for (const auto &v : comps_)
        rho.selfadjointView<Eigen::Lower>().rankUpdate(v);
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.selfadjointView<Eigen::Lower>());
    const Eigen::VectorXd &ev = es.eigenvalues();
    const double top = ev.maxCoeff();
    std::vector<Vector> next;
    for (Eigen::Index k = n - 1; k >= 0; --k)
        if (ev[k] > 1e-16 * top && ev[k] > 0.0)
            next.push_back(std::sqrt(ev[k]) * es.eigenvectors().col(k));
    comps_ = std::move(next);
}

double Ensemble::top_level_fraction(const std::string &mode) const {
    const auto dist = number_distribution(mode);
    double total = 0.0;
    for (double p : dist)
        total += p;
    if (!(total > 0.0))
        return 0.0;
    return dist.back() / total;
}

std::vector<double> Ensemble::number_distribution(const std::string &mode) const {
    const ModeSpace sp = space();
    const std::size_t stride = sp.stride(sp.position(mode));
    const auto d = static_cast<std::size_t>(cutoff_.dim());
    std::vector<double> dist(d, 0.0);
    for (const auto &v : comps_)
        for (Eigen::Index i = 0; i < v.size(); ++i)
            dist[(static_cast<std::size_t>(i) / stride) % d] += std::norm(v[i]);
    return dist;
}

double Ensemble::pattern_probability(const HeraldPattern &pattern) const {
    const ModeSpace sp = space();
    const auto d = static_cast<std::size_t>(cutoff_.dim());
    std::vector<double> w(dim_, 1.0);
    for (const auto &e : pattern.entries()) {
        const std::size_t stride = sp.stride(sp.position(e.mode));
        if (e.requirement.kind == Requirement::Kind::unmeasured)
            continue;
        const auto diag = outcome_diagonal(e.requirement, e.detector, cutoff_);
        for (std::size_t i = 0; i < dim_; ++i)
            w[i] *= diag[(i / stride) % d];
    }
    double p = 0.0;
    for (const auto &v : comps_)
        for (std::size_t i = 0; i < dim_; ++i)
            p += w[i] * std::norm(v[static_cast<Eigen::Index>(i)]);
    return p;
}

MixedState Ensemble::reduced(const std::vector<std::string> &keep) const {
    const SubsetLayout lay = layout_of(space(), keep);
    const auto dk = static_cast<Eigen::Index>(lay.local.size());
    const auto nr = static_cast<Eigen::Index>(lay.rest.size());
    Matrix rho = Matrix::Zero(dk, dk);
    Matrix x(dk, nr);
    for (const auto &v : comps_) {
        for (Eigen::Index k = 0; k < nr; ++k)
            for (Eigen::Index j = 0; j < dk; ++j)
                x(j, k) = v[static_cast<Eigen::Index>(lay.rest[k] + lay.local[j])];
        rho.noalias() += x * x.adjoint();
    }
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return MixedState(ModeSpace(keep, cutoff_), std::move(rho));
}

MixedState Ensemble::to_mixed() const { return reduced(modes_); }

PureState Ensemble::pure() const {
    if (comps_.size() != 1)
        throw Error("ensemble is not a single pure component");
    return PureState(space(), comps_.front());
}

} // namespace qoptics
