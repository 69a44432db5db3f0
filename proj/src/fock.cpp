#include "qoptics/fock.hpp"

#include "detail/layout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace qoptics {

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i)
        r *= base;
    return r;
}

} // namespace

namespace detail {

SubsetLayout layout_of(const ModeSpace &space,
                       const std::vector<std::string> &subset) {
    const std::size_t d = static_cast<std::size_t>(space.d());
    std::vector<std::size_t> positions;
    positions.reserve(subset.size());
    for (const auto &label : subset)
        positions.push_back(space.position(label));

    SubsetLayout out;
    out.local.assign(ipow(d, positions.size()), 0);
    for (std::size_t j = 0; j < out.local.size(); ++j) {
        std::size_t rem = j, off = 0;
        for (std::size_t p : positions) {
            off += (rem % d) * space.stride(p);
            rem /= d;
        }
        out.local[j] = off;
    }

    std::vector<std::size_t> others;
    for (std::size_t p = 0; p < space.num_modes(); ++p)
        if (std::find(positions.begin(), positions.end(), p) == positions.end())
            others.push_back(p);
    out.rest.assign(ipow(d, others.size()), 0);
    for (std::size_t k = 0; k < out.rest.size(); ++k) {
        std::size_t rem = k, off = 0;
        for (std::size_t p : others) {
            off += (rem % d) * space.stride(p);
            rem /= d;
        }
        out.rest[k] = off;
    }
    return out;
}

void apply_in_place(const Matrix &m, const SubsetLayout &lay,
                    Eigen::Ref<Vector> v) {
    const Eigen::Index dk = static_cast<Eigen::Index>(lay.local.size());
    const Eigen::Index nr = static_cast<Eigen::Index>(lay.rest.size());
    Matrix x(dk, nr);
    for (Eigen::Index k = 0; k < nr; ++k)
        for (Eigen::Index j = 0; j < dk; ++j)
            x(j, k) = v[lay.rest[k] + lay.local[j]];
    Matrix y = m * x;
    for (Eigen::Index k = 0; k < nr; ++k)
        for (Eigen::Index j = 0; j < dk; ++j)
            v[lay.rest[k] + lay.local[j]] = y(j, k);
}

} // namespace detail

using detail::SubsetLayout;
using detail::layout_of;
using detail::apply_in_place;

namespace {

void require_same_space(const ModeSpace &a, const ModeSpace &b,
                        const char *what) {
    if (!(a == b))
        throw DimensionError(std::string(what) +
                             ": operands live on different mode spaces");
}

void require_cutoff(const OperatorMatrix &op, const ModeSpace &space) {
    if (!(op.cutoff() == space.cutoff()))
        throw DimensionError("operator cutoff " +
                             std::to_string(op.cutoff().dim()) +
                             " does not match state cutoff " +
                             std::to_string(space.d()));
}

/// y = op applied to the subset described by `lay`, in place on `v`.
double hermitian_defect(const Matrix &m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

} // namespace

// ---------------------------------------------------------------------------

Cutoff::Cutoff(int d) : d_(d) {
    if (d < 2)
        throw ParameterError("cutoff must be at least 2, got " +
                             std::to_string(d));
}

ModeSpace::ModeSpace(std::vector<std::string> labels, Cutoff cutoff)
    : labels_(std::move(labels)), cutoff_(cutoff) {
    for (std::size_t i = 0; i < labels_.size(); ++i)
        for (std::size_t j = i + 1; j < labels_.size(); ++j)
            if (labels_[i] == labels_[j])
                throw ParameterError("duplicate mode label '" + labels_[i] +
                                     "'");
    dim_ = ipow(static_cast<std::size_t>(cutoff_.dim()), labels_.size());
}

bool ModeSpace::contains(const std::string &label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t ModeSpace::position(const std::string &label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end())
        throw UnknownModeError("unknown mode '" + label + "'");
    return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t ModeSpace::stride(std::size_t position) const {
    return ipow(static_cast<std::size_t>(d()), position);
}

std::vector<int> ModeSpace::digits(std::size_t index) const {
    std::vector<int> out(labels_.size());
    for (auto &digit : out) {
        digit = static_cast<int>(index % static_cast<std::size_t>(d()));
        index /= static_cast<std::size_t>(d());
    }
    return out;
}

std::size_t ModeSpace::flat_index(std::span<const int> levels) const {
    if (levels.size() != labels_.size())
        throw DimensionError("level list does not match the number of modes");
    std::size_t idx = 0;
    for (std::size_t p = levels.size(); p-- > 0;) {
        if (levels[p] < 0 || levels[p] >= d())
            throw DimensionError("Fock level out of range");
        idx = idx * static_cast<std::size_t>(d()) +
              static_cast<std::size_t>(levels[p]);
    }
    return idx;
}

ModeSpace ModeSpace::subspace(const std::vector<std::string> &keep) const {
    for (const auto &k : keep)
        position(k);
    return ModeSpace(keep, cutoff_);
}

ModeSpace ModeSpace::without(const std::string &label) const {
    position(label);
    std::vector<std::string> rest;
    for (const auto &l : labels_)
        if (l != label)
            rest.push_back(l);
    return ModeSpace(std::move(rest), cutoff_);
}

// ---------------------------------------------------------------------------

PureState::PureState(ModeSpace space, Vector amplitudes)
    : space_(std::move(space)), amps_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amps_.size()) != space_.dim())
        throw DimensionError("amplitude vector has " +
                             std::to_string(amps_.size()) + " entries, expected " +
                             std::to_string(space_.dim()));
    norm_tag_ = amps_.squaredNorm();
}

MixedState::MixedState(ModeSpace space, Matrix rho)
    : space_(std::move(space)), rho_(std::move(rho)) {
    const auto n = static_cast<Eigen::Index>(space_.dim());
    if (rho_.rows() != n || rho_.cols() != n)
        throw DimensionError("density matrix must be " + std::to_string(n) +
                             " x " + std::to_string(n));
    if (hermitian_defect(rho_) > 1e-10)
        throw ParameterError("density matrix is not Hermitian");
    trace_tag_ = rho_.trace().real();
    if (trace_tag_ > 1.0 + 1e-9)
        throw ParameterError("density matrix trace " +
                             std::to_string(trace_tag_) + " exceeds 1");
}

double MixedState::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

OperatorMatrix::OperatorMatrix(std::vector<std::string> acting_modes,
                               Cutoff cutoff, Matrix m)
    : space_(std::move(acting_modes), cutoff), m_(std::move(m)) {
    const auto n = static_cast<Eigen::Index>(space_.dim());
    if (m_.rows() != n || m_.cols() != n)
        throw DimensionError("operator matrix must be " + std::to_string(n) +
                             " x " + std::to_string(n) + " for " +
                             std::to_string(space_.num_modes()) + " mode(s)");
}

OperatorMatrix OperatorMatrix::relabeled(std::vector<std::string> modes) const {
    if (modes.size() != space_.num_modes())
        throw DimensionError("relabel needs one label per acting mode");
    return OperatorMatrix(std::move(modes), cutoff(), m_);
}

OperatorMatrix OperatorMatrix::adjoint() const {
    return OperatorMatrix(acting_modes(), cutoff(), m_.adjoint());
}

// ---------------------------------------------------------------------------

OperatorMatrix annihilation_matrix(Cutoff cutoff, std::string mode) {
    const int d = cutoff.dim();
    Matrix m = Matrix::Zero(d, d);
    for (int n = 1; n < d; ++n)
        m(n - 1, n) = std::sqrt(static_cast<double>(n));
    return OperatorMatrix({std::move(mode)}, cutoff, std::move(m));
}

OperatorMatrix creation_matrix(Cutoff cutoff, std::string mode) {
    return annihilation_matrix(cutoff, std::move(mode)).adjoint();
}

OperatorMatrix number_matrix(Cutoff cutoff, std::string mode) {
    const int d = cutoff.dim();
    Matrix m = Matrix::Zero(d, d);
    for (int n = 0; n < d; ++n)
        m(n, n) = static_cast<double>(n);
    return OperatorMatrix({std::move(mode)}, cutoff, std::move(m));
}

OperatorMatrix identity_matrix(const ModeSpace &space) {
    const auto n = static_cast<Eigen::Index>(space.dim());
    return OperatorMatrix(space.labels(), space.cutoff(),
                          Matrix::Identity(n, n));
}

OperatorMatrix truncated_commutator(Cutoff cutoff, std::string mode) {
    const Matrix a = annihilation_matrix(cutoff).matrix();
    const Matrix ad = a.adjoint();
    return OperatorMatrix({std::move(mode)}, cutoff, a * ad - ad * a);
}

OperatorMatrix embed(const OperatorMatrix &op, const ModeSpace &full) {
    require_cutoff(op, full);
    const SubsetLayout lay = layout_of(full, op.acting_modes());
    const auto n = static_cast<Eigen::Index>(full.dim());
    Matrix out = Matrix::Zero(n, n);
    const Matrix &m = op.matrix();
    for (std::size_t base : lay.rest)
        for (std::size_t i = 0; i < lay.local.size(); ++i)
            for (std::size_t j = 0; j < lay.local.size(); ++j)
                out(static_cast<Eigen::Index>(base + lay.local[i]),
                    static_cast<Eigen::Index>(base + lay.local[j])) =
                    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return OperatorMatrix(full.labels(), full.cutoff(), std::move(out));
}

OperatorMatrix embed(const OperatorMatrix &op,
                     const std::vector<std::string> &target_modes,
                     const ModeSpace &full) {
    return embed(op.relabeled(target_modes), full);
}

PureState apply(const OperatorMatrix &op, const PureState &state) {
    require_cutoff(op, state.space());
    const SubsetLayout lay = layout_of(state.space(), op.acting_modes());
    Vector v = state.amplitudes();
    apply_in_place(op.matrix(), lay, v);
    return PureState(state.space(), std::move(v));
}

MixedState apply(const OperatorMatrix &op, const MixedState &state) {
    require_cutoff(op, state.space());
    const SubsetLayout lay = layout_of(state.space(), op.acting_modes());
    // rho -> O rho, then (O (O rho)^dag) = O rho O^dag for Hermitian rho.
    Matrix rho = state.matrix();
    for (Eigen::Index c = 0; c < rho.cols(); ++c)
        apply_in_place(op.matrix(), lay, rho.col(c));
    Matrix half = rho.adjoint();
    for (Eigen::Index c = 0; c < half.cols(); ++c)
        apply_in_place(op.matrix(), lay, half.col(c));
    half = 0.5 * (half + half.adjoint()).eval();
    return MixedState(state.space(), std::move(half));
}

OperatorMatrix compose(const OperatorMatrix &first,
                       const OperatorMatrix &second) {
    if (!(first.cutoff() == second.cutoff()))
        throw DimensionError("compose: cutoffs differ");
    if (first.acting_modes() == second.acting_modes())
        return OperatorMatrix(first.acting_modes(), first.cutoff(),
                              first.matrix() * second.matrix());
    std::vector<std::string> modes = first.acting_modes();
    for (const auto &m : second.acting_modes())
        if (std::find(modes.begin(), modes.end(), m) == modes.end())
            modes.push_back(m);
    const ModeSpace joint(modes, first.cutoff());
    return OperatorMatrix(modes, first.cutoff(),
                          embed(first, joint).matrix() *
                              embed(second, joint).matrix());
}

cplx expectation(const OperatorMatrix &op, const PureState &state) {
    const PureState applied = apply(op, state);
    return state.amplitudes().dot(applied.amplitudes());
}

cplx expectation(const OperatorMatrix &op, const MixedState &state) {
    require_cutoff(op, state.space());
    const SubsetLayout lay = layout_of(state.space(), op.acting_modes());
    Matrix rho = state.matrix();
    for (Eigen::Index c = 0; c < rho.cols(); ++c)
        apply_in_place(op.matrix(), lay, rho.col(c));
    return rho.trace();
}

cplx inner_product(const PureState &lhs, const PureState &rhs) {
    require_same_space(lhs.space(), rhs.space(), "inner_product");
    return lhs.amplitudes().dot(rhs.amplitudes());
}

std::pair<PureState, double> normalize(const PureState &state) {
    const double w = state.weight();
    if (!(w > 0.0))
        throw ZeroProbabilityError("cannot normalize a zero-weight state");
    return {PureState(state.space(), state.amplitudes() / std::sqrt(w)), w};
}

std::pair<MixedState, double> normalize(const MixedState &state) {
    const double w = state.weight();
    if (!(w > 0.0))
        throw ZeroProbabilityError("cannot normalize a zero-weight state");
    return {MixedState(state.space(), state.matrix() / w), w};
}

MixedState to_mixed(const PureState &state) {
    const Vector &v = state.amplitudes();
    return MixedState(state.space(), v * v.adjoint());
}

MixedState partial_trace(const MixedState &state,
                         const std::vector<std::string> &keep_modes) {
    if (keep_modes.empty())
        throw ParameterError("partial_trace: keep set is empty");
    const ModeSpace kept = state.space().subspace(keep_modes);
    const SubsetLayout lay = layout_of(state.space(), keep_modes);
    const auto n = static_cast<Eigen::Index>(lay.local.size());
    Matrix out = Matrix::Zero(n, n);
    const Matrix &rho = state.matrix();
    for (std::size_t base : lay.rest)
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                out(i, j) += rho(static_cast<Eigen::Index>(base + lay.local[i]),
                                 static_cast<Eigen::Index>(base + lay.local[j]));
    return MixedState(kept, std::move(out));
}

MixedState partial_trace(const PureState &state,
                         const std::vector<std::string> &keep_modes) {
    if (keep_modes.empty())
        throw ParameterError("partial_trace: keep set is empty");
    const ModeSpace kept = state.space().subspace(keep_modes);
    const SubsetLayout lay = layout_of(state.space(), keep_modes);
    const auto n = static_cast<Eigen::Index>(lay.local.size());
    const auto nr = static_cast<Eigen::Index>(lay.rest.size());
    // Reshape into (kept x traced) and form X X^dag.
    Matrix x(n, nr);
    const Vector &v = state.amplitudes();
    for (Eigen::Index k = 0; k < nr; ++k)
        for (Eigen::Index j = 0; j < n; ++j)
            x(j, k) = v[static_cast<Eigen::Index>(lay.rest[k] + lay.local[j])];
    Matrix rho = x * x.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return MixedState(kept, std::move(rho));
}

namespace {

std::vector<std::size_t> permutation_map(const ModeSpace &from,
                                         const std::vector<std::string> &order) {
    if (order.size() != from.num_modes())
        throw DimensionError("permutation must list every mode exactly once");
    const ModeSpace to(order, from.cutoff());
    // Every label in `order` must exist in `from`; layout_of checks that.
    const SubsetLayout lay = layout_of(from, order);
    std::vector<std::size_t> map(to.dim());
    for (std::size_t j = 0; j < map.size(); ++j)
        map[j] = lay.local[j];
    return map;
}

} // namespace

PureState permute_modes(const PureState &state,
                        const std::vector<std::string> &order) {
    const auto map = permutation_map(state.space(), order);
    Vector v(static_cast<Eigen::Index>(map.size()));
    for (std::size_t j = 0; j < map.size(); ++j)
        v[static_cast<Eigen::Index>(j)] =
            state.amplitudes()[static_cast<Eigen::Index>(map[j])];
    return PureState(ModeSpace(order, state.cutoff()), std::move(v));
}

MixedState permute_modes(const MixedState &state,
                         const std::vector<std::string> &order) {
    const auto map = permutation_map(state.space(), order);
    const auto n = static_cast<Eigen::Index>(map.size());
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = state.matrix()(static_cast<Eigen::Index>(map[i]),
                                     static_cast<Eigen::Index>(map[j]));
    return MixedState(ModeSpace(order, state.cutoff()), std::move(m));
}

PureState tensor(const PureState &lhs, const PureState &rhs) {
    if (!(lhs.cutoff() == rhs.cutoff()))
        throw DimensionError("tensor: cutoffs differ");
    std::vector<std::string> modes = lhs.modes();
    modes.insert(modes.end(), rhs.modes().begin(), rhs.modes().end());
    ModeSpace space(std::move(modes), lhs.cutoff());
    const auto nl = lhs.amplitudes().size();
    Vector v(static_cast<Eigen::Index>(space.dim()));
    for (Eigen::Index j = 0; j < rhs.amplitudes().size(); ++j)
        v.segment(j * nl, nl) = rhs.amplitudes()[j] * lhs.amplitudes();
    return PureState(std::move(space), std::move(v));
}

MixedState tensor(const MixedState &lhs, const MixedState &rhs) {
    if (!(lhs.cutoff() == rhs.cutoff()))
        throw DimensionError("tensor: cutoffs differ");
    std::vector<std::string> modes = lhs.modes();
    modes.insert(modes.end(), rhs.modes().begin(), rhs.modes().end());
    ModeSpace space(std::move(modes), lhs.cutoff());
    const auto nl = lhs.matrix().rows();
    const auto nr = rhs.matrix().rows();
    Matrix m(nl * nr, nl * nr);
    for (Eigen::Index i = 0; i < nr; ++i)
        for (Eigen::Index j = 0; j < nr; ++j)
            m.block(i * nl, j * nl, nl, nl) = rhs.matrix()(i, j) * lhs.matrix();
    return MixedState(std::move(space), std::move(m));
}

std::vector<double> number_distribution(const PureState &state,
                                        const std::string &mode) {
    const std::size_t pos = state.space().position(mode);
    const std::size_t d = static_cast<std::size_t>(state.space().d());
    const std::size_t stride = state.space().stride(pos);
    std::vector<double> p(d, 0.0);
    const Vector &v = state.amplitudes();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        p[(static_cast<std::size_t>(i) / stride) % d] += std::norm(v[i]);
    return p;
}

std::vector<double> number_distribution(const MixedState &state,
                                        const std::string &mode) {
    const std::size_t pos = state.space().position(mode);
    const std::size_t d = static_cast<std::size_t>(state.space().d());
    const std::size_t stride = state.space().stride(pos);
    std::vector<double> p(d, 0.0);
    const Matrix &rho = state.matrix();
    for (Eigen::Index i = 0; i < rho.rows(); ++i)
        p[(static_cast<std::size_t>(i) / stride) % d] += rho(i, i).real();
    return p;
}

double top_level_population(const PureState &state, const std::string &mode) {
    const double w = state.weight();
    if (!(w > 0.0))
        return 0.0;
    return number_distribution(state, mode).back() / w;
}

double top_level_population(const MixedState &state, const std::string &mode) {
    const double w = state.weight();
    if (!(w > 0.0))
        return 0.0;
    return number_distribution(state, mode).back() / w;
}

double max_top_level_population(const PureState &state) {
    double worst = 0.0;
    for (const auto &m : state.modes())
        worst = std::max(worst, top_level_population(state, m));
    return worst;
}

double max_top_level_population(const MixedState &state) {
    double worst = 0.0;
    for (const auto &m : state.modes())
        worst = std::max(worst, top_level_population(state, m));
    return worst;
}

double trace_distance(const MixedState &rho, const MixedState &sigma) {
    require_same_space(rho.space(), sigma.space(), "trace_distance");
    const Matrix diff = rho.matrix() / rho.weight() - sigma.matrix() / sigma.weight();
    Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

} // namespace qoptics
