#pragma once

/**
 * @file
 * Compilation of a CircuitSpec into primitive steps and staged execution.
 *
 * Modes are prepared lazily right before their first use and traced out right
 * after their herald, so the live space stays small. Mixed states are carried
 * as ensembles of unnormalized pure vectors (rho = sum_k v_k v_k^dag), which
 * is exact because every supported POVM is diagonal in the Fock basis.
 */

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qoptics/circuit.hpp"
#include "qoptics/fock.hpp"
#include "qoptics/measurement.hpp"
#include "qoptics/phasespace.hpp"

namespace qoptics {

/// Wigner outputs double the automatic cutoff until it reaches this. Grid
/// values far from the peak scale with truncated amplitudes, not with the
/// leaked probability.
inline constexpr int kWignerMinCutoff = 24;

struct CutoffPolicy {
    std::optional<int> fixed; ///< never doubled when set
    double leak_budget = 1e-6;

    /// max(12, suggested cutoff of every input), doubled for Wigner outputs
    /// as above, or `fixed`.
    int resolve(const CircuitSpec &spec) const;
};

struct PlanStep {
    enum class Kind { prepare, unitary, condition, trace, output };
    Kind kind;
    /// Indices into CircuitSpec::modes.
    std::vector<std::size_t> modes;
    /// Index into inputs (prepare), statements (unitary, condition, trace)
    /// or outputs (output).
    std::size_t source = 0;

    friend bool operator==(const PlanStep &, const PlanStep &) = default;
};

struct ExecutionPlan {
    CircuitSpec spec;
    int cutoff = 0;
    double leak_budget = 1e-6;
    bool may_double = false;
    std::vector<PlanStep> steps;
    std::vector<std::string> warnings;

    friend bool operator==(const ExecutionPlan &, const ExecutionPlan &) = default;
};

/// Throws ParameterError if `spec` fails validation.
ExecutionPlan compile(const CircuitSpec &spec, const CutoffPolicy &policy = {});

std::string_view to_string(PlanStep::Kind kind);

/// Mixture of unnormalized pure vectors over an ordered set of live modes.
class Ensemble {
  public:
    Ensemble(std::vector<std::string> modes, Cutoff cutoff);

    const std::vector<std::string> &modes() const noexcept { return modes_; }
    Cutoff cutoff() const noexcept { return cutoff_; }
    ModeSpace space() const { return ModeSpace(modes_, cutoff_); }
    std::size_t dim() const noexcept { return dim_; }
    const std::vector<Vector> &components() const noexcept { return comps_; }
    std::size_t size() const noexcept { return comps_.size(); }

    double weight() const;
    bool is_pure() const noexcept { return comps_.size() == 1; }

    /// Append `mode` as the most significant digit, in the mixture
    /// sum_j |u_j><u_j|.
    void join(const std::string &mode, const std::vector<Vector> &local);
    void apply(const OperatorMatrix &op);
    /// Multiply each level n of `mode` by sqrt(diag[n]).
    void condition(const std::string &mode, const std::vector<double> &diag);
    /// Trace out `mode`; drops components of zero norm.
    void trace(const std::string &mode);
    /// Re-express the mixture with at most dim() components.
    void compact();

    /// Weight at level d-1 of `mode` divided by the total weight.
    double top_level_fraction(const std::string &mode) const;
    std::vector<double> number_distribution(const std::string &mode) const;
    double pattern_probability(const HeraldPattern &pattern) const;

    /// Reduced density matrix on `keep` (in that order).
    MixedState reduced(const std::vector<std::string> &keep) const;
    MixedState to_mixed() const;
    /// Only valid when is_pure().
    PureState pure() const;

  private:
    std::vector<std::string> modes_;
    Cutoff cutoff_;
    std::size_t dim_;
    std::vector<Vector> comps_;
};

struct HeraldRecord {
    std::string mode;
    /// Probability of this outcome given all earlier ones.
    double probability;
};

struct ClickPair {
    std::string first;
    std::string second;
    double probability;
};

struct ProbabilityReport {
    double herald_weight = 1.0;
    std::vector<HeraldRecord> heralds;
    /// Normalized photon-number distribution of every surviving mode.
    std::map<std::string, std::vector<double>> marginals;
    /// P(at least one photon) per surviving mode, ideal detector.
    std::map<std::string, double> click;
    std::vector<ClickPair> click_pairs;
};

/// Final state with surviving modes in declaration order.
using FinalState = std::variant<PureState, MixedState>;

struct OutputResult {
    OutputRequest request;
    std::variant<WignerGrid, double, ProbabilityReport, FinalState> value;
};

struct ExecutionResult {
    int cutoff = 0;
    double max_leak = 0.0;
    double herald_weight = 1.0;
    std::vector<HeraldRecord> heralds;
    Ensemble final_state;
    std::vector<OutputResult> outputs;
};

/// Runs the plan. Throws LeakBudgetError when the truncation leak exceeds
/// the plan's budget, ZeroProbabilityError for an impossible herald.
ExecutionResult execute(const ExecutionPlan &plan,
                        WignerEngine engine = WignerEngine::laguerre);

/// compile + execute, doubling the cutoff once on a leak failure unless the
/// policy fixes it.
ExecutionResult run_circuit(const CircuitSpec &spec,
                            const CutoffPolicy &policy = {},
                            WignerEngine engine = WignerEngine::laguerre);

/// Mixed reference for an input: the pure input or the thermal state.
MixedState input_state(const InputSpec &input, Cutoff cutoff,
                       const std::string &mode);

/// Fidelity of a single-mode state with an input: <phi|rho|phi> for pure
/// inputs, Uhlmann for thermal ones.
double input_fidelity(const InputSpec &input, const MixedState &state);

} // namespace qoptics
