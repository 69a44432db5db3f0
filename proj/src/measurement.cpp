#include "qoptics/measurement.hpp"

#include <cmath>
#include <set>

#include "detail/layout.hpp"

namespace qoptics {

using detail::layout_of;
using detail::SubsetLayout;

namespace {

double binomial(int n, int k) {
    if (k < 0 || k > n)
        return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

/// P(k of n photons detected) for binomial loss with efficiency eta.
double thinning(int n, int k, double eta) {
    if (k > n)
        return 0.0;
    return binomial(n, k) * std::pow(eta, k) * std::pow(1.0 - eta, n - k);
}

OperatorMatrix diagonal_operator(const std::vector<double> &diag, Cutoff cutoff,
                                 const std::string &mode) {
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(
        diag.data(), static_cast<Eigen::Index>(diag.size()));
    Matrix m = v.cast<cplx>().asDiagonal();
    return OperatorMatrix({mode}, cutoff, std::move(m));
}

/// Level n if `m` is the Fock projector |n><n|, else -1.
int fock_projector_level(const Matrix &m) {
    int level = -1;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const cplx v = m(i, j);
            if (i == j && std::abs(v - 1.0) < 1e-15) {
                if (level >= 0)
                    return -1;
                level = static_cast<int>(i);
            } else if (v != 0.0) {
                return -1;
            }
        }
    return level;
}

void check_probability(double prob, double input_weight) {
    if (!(prob > 1e-28 * input_weight) || !(prob > 0.0))
        throw ZeroProbabilityError(
            "conditioning on an outcome with zero probability");
}

void require_single_mode(const OperatorMatrix &element, const ModeSpace &space) {
    if (element.acting_modes().size() != 1)
        throw DimensionError("POVM element must act on exactly one mode");
    if (!(element.cutoff() == space.cutoff()))
        throw DimensionError("POVM element cutoff does not match the state");
}

/// Product of per-mode diagonal weights for each basis index of `space`.
std::vector<double> pattern_weights(const ModeSpace &space,
                                    const HeraldPattern &pattern) {
    std::vector<double> w(space.dim(), 1.0);
    const std::size_t d = static_cast<std::size_t>(space.d());
    for (const auto &e : pattern.entries()) {
        if (e.requirement.kind == Requirement::Kind::unmeasured) {
            space.position(e.mode);
            continue;
        }
        const std::size_t stride = space.stride(space.position(e.mode));
        const auto diag =
            outcome_diagonal(e.requirement, e.detector, space.cutoff());
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] *= diag[(i / stride) % d];
    }
    return w;
}

} // namespace

DetectorModel::DetectorModel(DetectorKind kind_, double efficiency_)
    : kind(kind_), efficiency(efficiency_) {
    if (!(efficiency >= 0.0 && efficiency <= 1.0))
        throw ParameterError("detector efficiency must lie in [0, 1]");
}

HeraldPattern::HeraldPattern(std::vector<HeraldEntry> entries)
    : entries_(std::move(entries)) {
    std::set<std::string> seen;
    for (const auto &e : entries_)
        if (!seen.insert(e.mode).second)
            throw ParameterError("mode '" + e.mode +
                                 "' appears twice in a herald pattern");
}

std::vector<OperatorMatrix> povm_elements(const DetectorModel &detector,
                                          Cutoff cutoff,
                                          const std::string &mode) {
    std::vector<OperatorMatrix> out;
    if (detector.kind == DetectorKind::on_off) {
        out.push_back(outcome_element(Requirement::no_click(), detector, cutoff,
                                      mode));
        out.push_back(
            outcome_element(Requirement::click(), detector, cutoff, mode));
        return out;
    }
    for (int k = 0; k < cutoff.dim(); ++k)
        out.push_back(
            outcome_element(Requirement::exactly(k), detector, cutoff, mode));
    return out;
}

std::vector<double> outcome_diagonal(const Requirement &req,
                                     const DetectorModel &detector,
                                     Cutoff cutoff) {
    const int d = cutoff.dim();
    const double eta = detector.efficiency;
    std::vector<double> diag(static_cast<std::size_t>(d), 1.0);
    switch (req.kind) {
    case Requirement::Kind::unmeasured:
        break;
    case Requirement::Kind::no_click:
        for (int n = 0; n < d; ++n)
            diag[n] = std::pow(1.0 - eta, n);
        break;
    case Requirement::Kind::click:
        for (int n = 0; n < d; ++n)
            diag[n] = 1.0 - std::pow(1.0 - eta, n);
        break;
    case Requirement::Kind::exactly:
        if (detector.kind == DetectorKind::on_off)
            throw ParameterError(
                "an on-off detector cannot resolve an exact photon number");
        if (req.count < 0 || req.count >= d)
            throw ParameterError("requested photon number " +
                                 std::to_string(req.count) +
                                 " outside the cutoff");
        for (int n = 0; n < d; ++n)
            diag[n] = thinning(n, req.count, eta);
        break;
    }
    return diag;
}

OperatorMatrix outcome_element(const Requirement &req,
                               const DetectorModel &detector, Cutoff cutoff,
                               const std::string &mode) {
    return diagonal_operator(outcome_diagonal(req, detector, cutoff), cutoff,
                             mode);
}

MixedState Conditioned::as_mixed() const {
    if (is_pure())
        return to_mixed(pure());
    return mixed();
}

PureState project_level(const PureState &state, const std::string &mode,
                        int level) {
    const SubsetLayout lay = layout_of(state.space(), {mode});
    const ModeSpace rest = state.space().without(mode);
    Vector v(static_cast<Eigen::Index>(lay.rest.size()));
    const std::size_t off = lay.local.at(static_cast<std::size_t>(level));
    for (std::size_t k = 0; k < lay.rest.size(); ++k)
        v[static_cast<Eigen::Index>(k)] =
            state.amplitudes()[static_cast<Eigen::Index>(lay.rest[k] + off)];
    return PureState(rest, std::move(v));
}

Conditioned condition(const PureState &state, const std::string &mode,
                      const OperatorMatrix &povm_element) {
    require_single_mode(povm_element, state.space());
    const int level = fock_projector_level(povm_element.matrix());
    if (level >= 0) {
        state.space().position(mode);
        PureState branch = project_level(state, mode, level);
        const double p = branch.weight();
        check_probability(p, state.weight());
        return {std::move(branch), p};
    }
    // rho'_{r r'} = sum_{ij} psi(i, r) E(j, i) conj(psi(j, r')).
    const SubsetLayout lay = layout_of(state.space(), {mode});
    const auto d = static_cast<Eigen::Index>(lay.local.size());
    const auto nr = static_cast<Eigen::Index>(lay.rest.size());
    Matrix x(d, nr);
    for (Eigen::Index k = 0; k < nr; ++k)
        for (Eigen::Index i = 0; i < d; ++i)
            x(i, k) = state.amplitudes()[static_cast<Eigen::Index>(
                lay.rest[k] + lay.local[i])];
    Matrix rho = x.transpose() * povm_element.matrix().transpose() * x.conjugate();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double p = rho.trace().real();
    check_probability(p, state.weight());
    return {MixedState(state.space().without(mode), std::move(rho)), p};
}

Conditioned condition(const MixedState &state, const std::string &mode,
                      const OperatorMatrix &povm_element) {
    require_single_mode(povm_element, state.space());
    const SubsetLayout lay = layout_of(state.space(), {mode});
    const auto d = static_cast<Eigen::Index>(lay.local.size());
    const auto nr = static_cast<Eigen::Index>(lay.rest.size());
    const Matrix &e = povm_element.matrix();
    const Matrix &rho = state.matrix();
    Matrix out = Matrix::Zero(nr, nr);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            const cplx eji = e(j, i);
            if (eji == 0.0)
                continue;
            for (Eigen::Index r = 0; r < nr; ++r)
                for (Eigen::Index c = 0; c < nr; ++c)
                    out(r, c) += eji * rho(static_cast<Eigen::Index>(
                                               lay.rest[r] + lay.local[i]),
                                           static_cast<Eigen::Index>(
                                               lay.rest[c] + lay.local[j]));
        }
    out = 0.5 * (out + out.adjoint()).eval();
    const double p = out.trace().real();
    check_probability(p, state.weight());
    return {MixedState(state.space().without(mode), std::move(out)), p};
}

double pattern_probability(const MixedState &state,
                           const HeraldPattern &pattern) {
    const auto w = pattern_weights(state.space(), pattern);
    double p = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        p += w[i] * state.matrix()(static_cast<Eigen::Index>(i),
                                   static_cast<Eigen::Index>(i))
                        .real();
    return p;
}

double pattern_probability(const PureState &state,
                           const HeraldPattern &pattern) {
    const auto w = pattern_weights(state.space(), pattern);
    double p = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        p += w[i] * std::norm(state.amplitudes()[static_cast<Eigen::Index>(i)]);
    return p;
}

double conditional_probability(const MixedState &state,
                               const HeraldPattern &joint,
                               const HeraldPattern &given) {
    const double pg = pattern_probability(state, given);
    if (!(pg > 0.0))
        throw ZeroProbabilityError(
            "conditional probability given an event of zero probability");
    return pattern_probability(state, joint) / pg;
}

} // namespace qoptics
