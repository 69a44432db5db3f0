#pragma once

/**
 * @file
 * The four-mode single-photon interferometer.
 *
 *     a: signal, b: PD1 port, c: PD2 port, d: idler (PD0)
 *
 *     bs a b T          photon subtraction tap (BS1)
 *     tmsq a d s        downconverter
 *     herald d          PD0 heralds the added photon
 *     bs a c T          second tap (BS2)
 *     bs c b T=0.5      BS3 erases which-tap information
 *     herald b, c       PD1 / PD2
 *
 * The PD2-only branch carries (aa^dag - a^dag a)|phi>, i.e. the input, and
 * the PD1-only branch carries (aa^dag + a^dag a)|phi>.
 */

#include <vector>

#include "qoptics/circuit.hpp"
#include "qoptics/executor.hpp"

namespace qoptics {

struct SchemeParams {
    InputSpec input = InputSpec::coherent(1.0);
    double T = 0.99;
    double s = 0.1;
    double eta_pd0 = 1.0;
    double eta_pd1 = 1.0;
    double eta_pd2 = 1.0;
    bool pd0_onoff = false;
    bool pd12_onoff = false;
    /// Write BS3 with the other port transmitted; swaps which detector
    /// heralds the identity.
    bool flip_bs3 = false;
    CutoffPolicy cutoff;

    /// Throws ParameterError.
    void validate() const;
};

enum class Branch { pd1, pd2 };

std::string_view to_string(Branch b);

/// Full circuit for one branch, with `out fidelity a input` and `out probs`.
CircuitSpec build_fig1_circuit(const SchemeParams &params,
                               Branch branch = Branch::pd2);

/// Circuit up to BS3 with no PD1/PD2 heralds, ending in `out probs`.
CircuitSpec build_fig1_prefix(const SchemeParams &params);

struct BranchResult {
    MixedState state; ///< mode a, unnormalized (trace = weight)
    double weight;
    double fidelity_to_input;
    /// |t alpha> for coherent inputs, thermal(T nbar) for thermal ones,
    /// the input otherwise.
    double fidelity_to_attenuated;
};

struct SchemeResult {
    BranchResult pd1;
    BranchResult pd2;
    double p_pd0;
    double p_b;
    double p_c;
    double p_bc;
    double p_bc_given_b;
    double p_bc_given_c;
    int cutoff;
    double leak;
};

SchemeResult run_interferometer(const SchemeParams &params);

/// |t alpha> for coherent inputs, thermal(T nbar) for thermal ones, the input
/// otherwise.
InputSpec attenuated_input(const SchemeParams &params);

/// First-order branches: commutator = (lambda r / sqrt2)(aa^dag - a^dag a)phi
/// and anticommutator = -(lambda r / sqrt2)(aa^dag + a^dag a)phi, with the
/// untruncated action aa^dag|n> = (n+1)|n>.
struct OracleBranches {
    PureState commutator;
    PureState anticommutator;
};

OracleBranches analytic_branch_oracle(const PureState &input,
                                      const SchemeParams &params);

struct CommutationRow {
    double alpha;
    double f_input;
    double f_attenuated;
    double f_predicted; ///< exp(-(1-t)^2 |alpha|^2)
    double f_oracle;    ///< PD2 branch vs commutator oracle
    double p_bc_given_b;
    double p_bc_given_c;
    double pd1_wigner_min;
    double weight_ratio;   ///< pd1 weight / pd2 weight
    double expected_ratio; ///< <(1 + 2n)^2>
};

std::vector<CommutationRow> commutation_report(const SchemeParams &base,
                                               const std::vector<double> &alphas);

struct Degradation {
    double f_ideal;
    double f_degraded;
    double relative; ///< (f_ideal - f_degraded) / f_ideal
};

/// PD2-branch fidelity to the input with on-off PD1/PD2 at efficiency eta,
/// against ideal number-resolving detectors.
Degradation efficiency_degradation(const SchemeParams &params, double eta);

WignerGrid branch_wigner(const SchemeParams &params, Branch branch,
                         const Axis &re = {}, const Axis &im = {});

/// Conditional photon statistics of a thermal input after heralded
/// subtraction (beam-splitter tap) or addition (downconverter).
struct ConditionalStatistics {
    std::vector<double> measured;  ///< simulated, normalized
    std::vector<double> predicted; ///< n P0(n) or (n+1) P0(n), normalized
    std::vector<double> exact;     ///< closed form with the T^n / mu^-2n factors
};

ConditionalStatistics subtraction_statistics(double nbar, double T,
                                             const CutoffPolicy &policy = {});
ConditionalStatistics addition_statistics(double nbar, double s,
                                          const CutoffPolicy &policy = {});

} // namespace qoptics
