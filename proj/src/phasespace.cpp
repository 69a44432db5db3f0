#include "qoptics/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "qoptics/diagnostics.hpp"

namespace qoptics {

namespace {

constexpr double two_over_pi = 2.0 / std::numbers::pi;

void require_single_mode(const ModeSpace &space) {
    if (space.num_modes() != 1)
        throw DimensionError("Wigner function needs a single-mode state, got " +
                             std::to_string(space.num_modes()) + " modes");
}

/// W(beta) from the recurrence for displaced-parity matrix elements:
/// w[m][n] = (2/pi) <n| D(2 beta) P |m> up to conjugation, built row by row
/// so only O(d) storage is live.
double wigner_laguerre(const Matrix &rho, std::complex<double> beta) {
    const Eigen::Index d = rho.rows();
    std::vector<cplx> w(static_cast<std::size_t>(d));
    const cplx a2 = 2.0 * beta;
    w[0] = std::exp(-2.0 * std::norm(beta)) / std::numbers::pi;
    double total = rho(0, 0).real() * w[0].real();
    for (Eigen::Index n = 1; n < d; ++n) {
        w[n] = a2 * w[n - 1] / std::sqrt(static_cast<double>(n));
        total += 2.0 * (rho(0, n) * w[n]).real();
    }
    for (Eigen::Index m = 1; m < d; ++m) {
        const double sm = std::sqrt(static_cast<double>(m));
        cplx temp = w[m];
        w[m] = (std::conj(a2) * temp - sm * w[m - 1]) / sm;
        total += rho(m, m).real() * w[m].real();
        for (Eigen::Index n = m + 1; n < d; ++n) {
            const cplx next =
                (a2 * w[n - 1] - sm * temp) / std::sqrt(static_cast<double>(n));
            temp = w[n];
            w[n] = next;
            total += 2.0 * (rho(m, n) * w[n]).real();
        }
    }
    return 2.0 * total;
}

double wigner_displaced_parity(const Matrix &rho, std::complex<double> beta) {
    const auto d = static_cast<int>(rho.rows());
    const double b = std::abs(beta);
    const int pad = static_cast<int>(std::ceil(6.0 * b * b + 10.0 * b + 10.0));
    const int big = d + pad;
    Matrix r = Matrix::Zero(big, big);
    r.topLeftCorner(d, d) = rho;
    const Matrix disp = displacement_operator(-beta, Cutoff(big)).matrix();
    const Matrix shifted = disp * r * disp.adjoint();
    double total = 0.0;
    for (int n = 0; n < big; ++n)
        total += (n % 2 == 0 ? 1.0 : -1.0) * shifted(n, n).real();
    return two_over_pi * total;
}

double evaluate(const Matrix &rho, std::complex<double> beta,
                WignerEngine engine) {
    return engine == WignerEngine::laguerre ? wigner_laguerre(rho, beta)
                                            : wigner_displaced_parity(rho, beta);
}

Matrix normalized_matrix(const MixedState &state) {
    const double w = state.weight();
    if (!(w > 0.0))
        throw ZeroProbabilityError("state has zero weight");
    return state.matrix() / w;
}

double clamp_unit(double f) {
    if (f < 0.0 && f > -1e-9)
        return 0.0;
    if (f > 1.0 && f < 1.0 + 1e-9)
        return 1.0;
    return f;
}

} // namespace

Axis::Axis(double min_, double max_, int count_)
    : min(min_), max(max_), count(count_) {
    if (count < 2)
        throw ParameterError("grid axis needs at least 2 points");
    if (!(max > min))
        throw ParameterError("grid axis needs max > min");
}

double Axis::at(int k) const {
    if (k == count - 1)
        return max;
    return min + k * step();
}

WignerGrid wigner(const MixedState &state, const Axis &re, const Axis &im,
                  WignerEngine engine) {
    require_single_mode(state.space());
    if (re.count < 5 || im.count < 5)
        warn("Wigner grid with fewer than 5 points per axis cannot resolve "
             "a minimum");
    const Matrix rho = normalized_matrix(state);
    WignerGrid grid{re, im, Eigen::MatrixXd(im.count, re.count)};
    for (int i = 0; i < im.count; ++i)
        for (int j = 0; j < re.count; ++j)
            grid.values(i, j) = evaluate(rho, grid.beta(i, j), engine);
    return grid;
}

WignerGrid wigner(const PureState &state, const Axis &re, const Axis &im,
                  WignerEngine engine) {
    return wigner(to_mixed(state), re, im, engine);
}

double wigner_at(const MixedState &state, std::complex<double> beta,
                 WignerEngine engine) {
    require_single_mode(state.space());
    return evaluate(normalized_matrix(state), beta, engine);
}

OperatorMatrix displacement_operator(std::complex<double> beta, Cutoff cutoff,
                                     std::string mode) {
    const Matrix a = annihilation_matrix(cutoff).matrix();
    const Matrix gen = beta * a.adjoint() - std::conj(beta) * a;
    return OperatorMatrix({std::move(mode)}, cutoff, gen.exp());
}

double gaussian_wigner_oracle(GaussianKind kind, std::complex<double> param,
                              std::complex<double> beta) {
    if (kind == GaussianKind::coherent)
        return two_over_pi * std::exp(-2.0 * std::norm(beta - param));
    const double nbar = param.real();
    const double width = 2.0 * nbar + 1.0;
    return two_over_pi / width * std::exp(-2.0 * std::norm(beta) / width);
}

double fidelity(const PureState &reference, const MixedState &state) {
    if (!(reference.space() == state.space()))
        throw DimensionError("fidelity: reference and state differ in modes "
                             "or cutoff");
    const double wr = reference.weight();
    const double ws = state.weight();
    if (!(wr > 0.0) || !(ws > 0.0))
        throw ZeroProbabilityError("fidelity of a zero-weight state");
    const Vector &phi = reference.amplitudes();
    const double f = phi.dot(state.matrix() * phi).real() / (wr * ws);
    return clamp_unit(f);
}

double fidelity(const PureState &reference, const PureState &state) {
    if (!(reference.space() == state.space()))
        throw DimensionError("fidelity: reference and state differ in modes "
                             "or cutoff");
    const double wr = reference.weight();
    const double ws = state.weight();
    if (!(wr > 0.0) || !(ws > 0.0))
        throw ZeroProbabilityError("fidelity of a zero-weight state");
    return clamp_unit(std::norm(inner_product(reference, state)) / (wr * ws));
}

double state_fidelity(const MixedState &rho, const MixedState &sigma) {
    if (!(rho.space() == sigma.space()))
        throw DimensionError("fidelity: states differ in modes or cutoff");
    const Matrix r = normalized_matrix(rho);
    const Matrix s = normalized_matrix(sigma);
    Eigen::SelfAdjointEigenSolver<Matrix> er(r);
    const Eigen::VectorXd ev = er.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Matrix sqrt_r =
        er.eigenvectors() * ev.cast<cplx>().asDiagonal() * er.eigenvectors().adjoint();
    Matrix inner = sqrt_r * s * sqrt_r;
    inner = 0.5 * (inner + inner.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> ei(inner, Eigen::EigenvaluesOnly);
    const double tr = ei.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return clamp_unit(tr * tr);
}

WignerMinimum min_wigner(const WignerGrid &grid) {
    Eigen::Index row = 0, col = 0;
    const double value = grid.values.minCoeff(&row, &col);
    return {grid.beta(static_cast<int>(row), static_cast<int>(col)), value};
}

double grid_integral(const WignerGrid &grid) {
    return grid.values.sum() * grid.re.step() * grid.im.step();
}

double parity_expectation(const MixedState &state) {
    require_single_mode(state.space());
    const Matrix rho = normalized_matrix(state);
    double p = 0.0;
    for (Eigen::Index n = 0; n < rho.rows(); ++n)
        p += (n % 2 == 0 ? 1.0 : -1.0) * rho(n, n).real();
    return p;
}

} // namespace qoptics
