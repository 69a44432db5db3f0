#include "qoptics/elements.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "qoptics/diagnostics.hpp"

namespace qoptics {

namespace {

/// Two-mode operator from a real generator that conserves some integer
/// label of |n_x, n_y>: exponentiate each invariant block separately.
/// `label(nx, ny)` picks the block, `couple(nx, ny)` lists the single
/// off-diagonal element of the generator leaving |nx, ny>.
template <class Label, class Couple>
Matrix blockwise_exp(int d, Label label, Couple couple) {
    const int n = d * d;
    // Group basis states by block label.
    std::vector<int> block_of(n);
    int lo = 0, hi = 0;
    for (int idx = 0; idx < n; ++idx) {
        block_of[idx] = label(idx % d, idx / d);
        lo = std::min(lo, block_of[idx]);
        hi = std::max(hi, block_of[idx]);
    }
    std::vector<std::vector<int>> members(static_cast<std::size_t>(hi - lo + 1));
    for (int idx = 0; idx < n; ++idx)
        members[static_cast<std::size_t>(block_of[idx] - lo)].push_back(idx);

    Matrix u = Matrix::Zero(n, n);
    std::vector<int> where(n, -1);
    for (const auto &block : members) {
        if (block.empty())
            continue;
        const int k = static_cast<int>(block.size());
        for (int i = 0; i < k; ++i)
            where[block[i]] = i;
        Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i) {
            const int idx = block[i];
            auto [target, amp] = couple(idx % d, idx / d);
            if (target >= 0 && amp != 0.0) {
                gen(where[target], i) += amp;
                gen(i, where[target]) -= amp;
            }
        }
        const Eigen::MatrixXd e = gen.exp();
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                u(block[i], block[j]) = e(i, j);
    }
    return u;
}

} // namespace

BeamSplitterParams::BeamSplitterParams(double T_, std::string transmitted_,
                                       std::string reflected_)
    : T(T_), transmitted(std::move(transmitted_)),
      reflected(std::move(reflected_)) {
    if (!(T > 0.0 && T <= 1.0))
        throw ParameterError("beam splitter transmittivity must lie in (0, 1]");
    if (transmitted == reflected)
        throw ParameterError("beam splitter modes must differ");
}

double BeamSplitterParams::t() const { return std::sqrt(T); }
double BeamSplitterParams::r() const { return std::sqrt(1.0 - T); }

SqueezerParams::SqueezerParams(double s_, std::string signal_,
                               std::string idler_)
    : s(s_), signal(std::move(signal_)), idler(std::move(idler_)) {
    if (!(s >= 0.0) || !std::isfinite(s))
        throw ParameterError("squeezer coupling must be non-negative");
    if (signal == idler)
        throw ParameterError("squeezer modes must differ");
}

double SqueezerParams::mu() const { return std::cosh(s); }
double SqueezerParams::nu() const { return std::sinh(s); }
double SqueezerParams::lambda() const { return std::tanh(s); }

PureState fock_state(int n, Cutoff cutoff, std::string mode) {
    if (n < 0 || n >= cutoff.dim())
        throw ParameterError("Fock level " + std::to_string(n) +
                             " outside cutoff " + std::to_string(cutoff.dim()));
    Vector v = Vector::Zero(cutoff.dim());
    v[n] = 1.0;
    return PureState(ModeSpace({std::move(mode)}, cutoff), std::move(v));
}

PureState vacuum(Cutoff cutoff, std::string mode) {
    return fock_state(0, cutoff, std::move(mode));
}

PureState coherent_state(cplx alpha, Cutoff cutoff, std::string mode) {
    const int d = cutoff.dim();
    if (std::norm(alpha) > d / 4.0) {
        std::ostringstream msg;
        msg << "coherent amplitude |alpha|^2 = " << std::norm(alpha)
            << " exceeds d/4 at cutoff " << d;
        warn(msg.str());
    }
    Vector v(d);
    v[0] = std::exp(-std::norm(alpha) / 2.0);
    for (int n = 1; n < d; ++n)
        v[n] = v[n - 1] * alpha / std::sqrt(static_cast<double>(n));
    v /= v.norm();
    return PureState(ModeSpace({std::move(mode)}, cutoff), std::move(v));
}

double coherent_tail(cplx alpha, Cutoff cutoff) {
    const double x = std::norm(alpha);
    if (x == 0.0)
        return 0.0;
    // Poisson(x) mass at n >= d, summed upward from the first omitted term.
    const int d = cutoff.dim();
    double log_term = -x + d * std::log(x) - std::lgamma(d + 1.0);
    double term = std::exp(log_term);
    double sum = 0.0;
    for (int n = d; n < d + 10000; ++n) {
        sum += term;
        term *= x / (n + 1);
        if (term < 1e-18 * sum || term == 0.0)
            break;
    }
    return std::min(sum, 1.0);
}

MixedState thermal_state(double nbar, Cutoff cutoff, std::string mode) {
    if (!(nbar >= 0.0) || !std::isfinite(nbar))
        throw ParameterError("thermal mean photon number must be non-negative");
    const int d = cutoff.dim();
    Eigen::VectorXd p(d);
    const double q = nbar / (nbar + 1.0);
    p[0] = 1.0 / (nbar + 1.0);
    for (int n = 1; n < d; ++n)
        p[n] = p[n - 1] * q;
    p /= p.sum();
    Matrix rho = p.cast<cplx>().asDiagonal();
    return MixedState(ModeSpace({std::move(mode)}, cutoff), std::move(rho));
}

double thermal_tail(double nbar, Cutoff cutoff) {
    if (nbar <= 0.0)
        return 0.0;
    return std::pow(nbar / (nbar + 1.0), cutoff.dim());
}

OperatorMatrix beam_splitter_unitary(const BeamSplitterParams &params,
                                     Cutoff cutoff) {
    const int d = cutoff.dim();
    const double theta = std::atan2(params.r(), params.t());
    // Generator theta (y^dag x - x^dag y) conserves n_x + n_y.
    // Coupling out of |nx, ny>: y^dag x -> |nx-1, ny+1> with sqrt(nx (ny+1)).
    auto label = [](int nx, int ny) { return nx + ny; };
    auto couple = [&](int nx, int ny) -> std::pair<int, double> {
        if (nx == 0 || ny + 1 >= d)
            return {-1, 0.0};
        const int target = (nx - 1) + d * (ny + 1);
        return {target, theta * std::sqrt(static_cast<double>(nx) * (ny + 1))};
    };
    return OperatorMatrix({params.transmitted, params.reflected}, cutoff,
                          blockwise_exp(d, label, couple));
}

OperatorMatrix two_mode_squeezer_unitary(const SqueezerParams &params,
                                         Cutoff cutoff) {
    const int d = cutoff.dim();
    const double s = params.s;
    // Generator -s x^dag y^dag + s x y conserves n_x - n_y.
    // Coupling out of |nx, ny>: -s x^dag y^dag -> |nx+1, ny+1>.
    auto label = [](int nx, int ny) { return nx - ny; };
    auto couple = [&](int nx, int ny) -> std::pair<int, double> {
        if (nx + 1 >= d || ny + 1 >= d)
            return {-1, 0.0};
        const int target = (nx + 1) + d * (ny + 1);
        return {target, -s * std::sqrt(static_cast<double>(nx + 1) * (ny + 1))};
    };
    return OperatorMatrix({params.signal, params.idler}, cutoff,
                          blockwise_exp(d, label, couple));
}

} // namespace qoptics
