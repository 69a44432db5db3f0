#pragma once

/**
 * @file
 * Truncated Fock-space linear algebra.
 *
 * A state over modes (m_0, ..., m_{M-1}) at cutoff d is a flat array of
 * d^M amplitudes. The flat index is little-endian in the mode list:
 *
 *     index = n_0 + d * n_1 + d^2 * n_2 + ...
 *
 * so the first listed mode varies fastest. Saved states use the same order.
 */

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qoptics/error.hpp"

namespace qoptics {

using cplx = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

/// Number of retained Fock levels per mode (levels 0..d-1).
class Cutoff {
  public:
    explicit Cutoff(int d);

    int dim() const noexcept { return d_; }
    int top() const noexcept { return d_ - 1; }

    friend bool operator==(const Cutoff &, const Cutoff &) = default;

  private:
    int d_;
};

/// Ordered list of mode labels sharing one cutoff.
class ModeSpace {
  public:
    ModeSpace(std::vector<std::string> labels, Cutoff cutoff);

    const std::vector<std::string> &labels() const noexcept { return labels_; }
    Cutoff cutoff() const noexcept { return cutoff_; }
    int d() const noexcept { return cutoff_.dim(); }
    std::size_t num_modes() const noexcept { return labels_.size(); }
    std::size_t dim() const noexcept { return dim_; }

    bool contains(const std::string &label) const;
    /// Position of a label in the mode list; throws UnknownModeError.
    std::size_t position(const std::string &label) const;
    /// d^position: distance in the flat index between adjacent levels of a mode.
    std::size_t stride(std::size_t position) const;

    /// Occupation of every mode for a flat index.
    std::vector<int> digits(std::size_t index) const;
    std::size_t flat_index(std::span<const int> levels) const;

    /// Space with `keep` in the order given.
    ModeSpace subspace(const std::vector<std::string> &keep) const;
    /// Space with `label` removed.
    ModeSpace without(const std::string &label) const;

    friend bool operator==(const ModeSpace &, const ModeSpace &) = default;

  private:
    std::vector<std::string> labels_;
    Cutoff cutoff_;
    std::size_t dim_;
};

/// Pure (possibly unnormalized) state. The squared norm is the state's
/// weight: heralded branches carry their outcome probability in it.
class PureState {
  public:
    PureState(ModeSpace space, Vector amplitudes);

    const ModeSpace &space() const noexcept { return space_; }
    const Vector &amplitudes() const noexcept { return amps_; }
    const std::vector<std::string> &modes() const noexcept {
        return space_.labels();
    }
    Cutoff cutoff() const noexcept { return space_.cutoff(); }
    /// Recorded squared norm.
    double norm_tag() const noexcept { return norm_tag_; }
    double weight() const noexcept { return norm_tag_; }

  private:
    ModeSpace space_;
    Vector amps_;
    double norm_tag_;
};

/// Density matrix over a mode space. Trace is the state's weight.
class MixedState {
  public:
    /// Checks Hermiticity (1e-10) and trace <= 1 + 1e-9.
    MixedState(ModeSpace space, Matrix rho);

    const ModeSpace &space() const noexcept { return space_; }
    const Matrix &matrix() const noexcept { return rho_; }
    const std::vector<std::string> &modes() const noexcept {
        return space_.labels();
    }
    Cutoff cutoff() const noexcept { return space_.cutoff(); }
    double trace_tag() const noexcept { return trace_tag_; }
    double weight() const noexcept { return trace_tag_; }

    /// Smallest eigenvalue; the positivity invariant is min_eigenvalue() >= -1e-9.
    double min_eigenvalue() const;

  private:
    ModeSpace space_;
    Matrix rho_;
    double trace_tag_;
};

/// Dense operator acting on a set of modes. Matrix dimension is d^|modes|
/// with the little-endian ordering of `acting_modes`.
class OperatorMatrix {
  public:
    OperatorMatrix(std::vector<std::string> acting_modes, Cutoff cutoff,
                   Matrix m);

    const std::vector<std::string> &acting_modes() const noexcept {
        return space_.labels();
    }
    const ModeSpace &space() const noexcept { return space_; }
    Cutoff cutoff() const noexcept { return space_.cutoff(); }
    const Matrix &matrix() const noexcept { return m_; }

    /// Same matrix, acting on differently named modes.
    OperatorMatrix relabeled(std::vector<std::string> modes) const;
    OperatorMatrix adjoint() const;

  private:
    ModeSpace space_;
    Matrix m_;
};

OperatorMatrix annihilation_matrix(Cutoff cutoff, std::string mode = "a");
OperatorMatrix creation_matrix(Cutoff cutoff, std::string mode = "a");
OperatorMatrix number_matrix(Cutoff cutoff, std::string mode = "a");
OperatorMatrix identity_matrix(const ModeSpace &space);

/// a a^dag - a^dag a in the truncated space: diag(1, ..., 1, -(d-1)).
OperatorMatrix truncated_commutator(Cutoff cutoff, std::string mode = "a");

/// Tensor `op` with the identity on every other mode of `full`.
OperatorMatrix embed(const OperatorMatrix &op, const ModeSpace &full);
/// Relabel `op` onto `target_modes`, then embed.
OperatorMatrix embed(const OperatorMatrix &op,
                     const std::vector<std::string> &target_modes,
                     const ModeSpace &full);

/// Apply op to the modes of the state it names; other modes untouched.
PureState apply(const OperatorMatrix &op, const PureState &state);
/// rho -> op rho op^dag.
MixedState apply(const OperatorMatrix &op, const MixedState &state);

/// Product first * second. Operators on different mode sets are embedded
/// into the union (modes of `first` then new modes of `second`).
OperatorMatrix compose(const OperatorMatrix &first,
                       const OperatorMatrix &second);

cplx expectation(const OperatorMatrix &op, const PureState &state);
cplx expectation(const OperatorMatrix &op, const MixedState &state);
/// <lhs|rhs>
cplx inner_product(const PureState &lhs, const PureState &rhs);

/// Scale to unit weight; returns the weight that was divided out.
std::pair<PureState, double> normalize(const PureState &state);
std::pair<MixedState, double> normalize(const MixedState &state);

MixedState to_mixed(const PureState &state);

/// Reduced density matrix on `keep_modes` (in that order).
MixedState partial_trace(const MixedState &state,
                         const std::vector<std::string> &keep_modes);
MixedState partial_trace(const PureState &state,
                         const std::vector<std::string> &keep_modes);

/// Reorder the modes of a state. `order` must be a permutation of its labels.
PureState permute_modes(const PureState &state,
                        const std::vector<std::string> &order);
MixedState permute_modes(const MixedState &state,
                         const std::vector<std::string> &order);

/// |lhs> (x) |rhs>; lhs modes come first (least significant).
PureState tensor(const PureState &lhs, const PureState &rhs);
MixedState tensor(const MixedState &lhs, const MixedState &rhs);

/// Population of level d-1 of `mode`, relative to the state's weight.
double top_level_population(const PureState &state, const std::string &mode);
double top_level_population(const MixedState &state, const std::string &mode);
/// Max of top_level_population over all modes.
double max_top_level_population(const PureState &state);
double max_top_level_population(const MixedState &state);

/// Photon-number distribution of one mode (unnormalized; sums to weight).
std::vector<double> number_distribution(const PureState &state,
                                        const std::string &mode);
std::vector<double> number_distribution(const MixedState &state,
                                        const std::string &mode);

/// 0.5 * || rho - sigma ||_1 for normalized copies of both states.
double trace_distance(const MixedState &rho, const MixedState &sigma);

} // namespace qoptics
