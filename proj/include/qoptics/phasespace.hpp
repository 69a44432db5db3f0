#pragma once

/**
 * @file
 * Wigner function, fidelity and nonclassicality diagnostics.
 *
 * Convention: W(beta) = (2/pi) Tr[rho D(beta) P D(beta)^dag] with P the
 * photon-number parity, so the vacuum has W(0) = 2/pi and the integral of
 * W over the complex beta plane is 1. The state is normalized by its trace
 * before evaluation, so heralded branches can be passed directly.
 */

#include <complex>
#include <vector>

#include "qoptics/fock.hpp"

namespace qoptics {

/// Evenly spaced samples min, ..., max (inclusive).
struct Axis {
    double min = -3.0;
    double max = 3.0;
    int count = 81;

    Axis() = default;
    Axis(double min, double max, int count);

    double at(int k) const;
    double step() const { return (max - min) / (count - 1); }

    friend bool operator==(const Axis &, const Axis &) = default;
};

/// W sampled on a rectangular grid. `values(i, j)` is W at
/// beta = re.at(j) + i * im.at(i): rows follow the imaginary axis.
struct WignerGrid {
    Axis re;
    Axis im;
    Eigen::MatrixXd values;

    std::complex<double> beta(int row, int col) const {
        return {re.at(col), im.at(row)};
    }
};

enum class WignerEngine {
    /// Exact displaced-parity matrix elements via the Laguerre recurrence.
    laguerre,
    /// Parity expectation of D(-beta) rho D(-beta)^dag with D from a matrix
    /// exponential on a padded working space.
    displaced_parity,
};

/// W on a grid. Warns when the grid cannot resolve a minimum (< 5 points
/// per axis).
WignerGrid wigner(const MixedState &state, const Axis &re, const Axis &im,
                  WignerEngine engine = WignerEngine::laguerre);
WignerGrid wigner(const PureState &state, const Axis &re, const Axis &im,
                  WignerEngine engine = WignerEngine::laguerre);

double wigner_at(const MixedState &state, std::complex<double> beta,
                 WignerEngine engine = WignerEngine::laguerre);

/// Displacement D(beta) = exp(beta a^dag - beta* a) by matrix exponential
/// of the truncated generator.
OperatorMatrix displacement_operator(std::complex<double> beta, Cutoff cutoff,
                                     std::string mode = "a");

enum class GaussianKind { coherent, thermal };

/// Closed-form W for a coherent state (param = alpha) or thermal state
/// (param = nbar, imaginary part ignored).
double gaussian_wigner_oracle(GaussianKind kind, std::complex<double> param,
                              std::complex<double> beta);

/// <phi|rho|phi> for normalized copies of both. Values within 1e-9 outside
/// [0, 1] are clamped.
double fidelity(const PureState &reference, const MixedState &state);
double fidelity(const PureState &reference, const PureState &state);
/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2; reduces to
/// <phi|sigma|phi> for pure rho.
double state_fidelity(const MixedState &rho, const MixedState &sigma);

struct WignerMinimum {
    std::complex<double> beta;
    double value;
};

WignerMinimum min_wigner(const WignerGrid &grid);

/// Riemann sum of W over the grid cells.
double grid_integral(const WignerGrid &grid);

/// <(-1)^n> of the normalized single-mode state.
double parity_expectation(const MixedState &state);

} // namespace qoptics
