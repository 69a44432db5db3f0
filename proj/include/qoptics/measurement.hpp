#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qoptics/fock.hpp"

namespace qoptics {

enum class DetectorKind { number_resolving, on_off };

/// Photodetector with binomial loss folded into its POVM.
struct DetectorModel {
    DetectorKind kind = DetectorKind::number_resolving;
    double efficiency = 1.0;

    DetectorModel() = default;
    DetectorModel(DetectorKind kind, double efficiency);

    static DetectorModel ideal() { return {}; }
    static DetectorModel on_off(double efficiency) {
        return {DetectorKind::on_off, efficiency};
    }
    static DetectorModel resolving(double efficiency) {
        return {DetectorKind::number_resolving, efficiency};
    }

    friend bool operator==(const DetectorModel &, const DetectorModel &) = default;
};

/// What a heralding detector must report on its mode.
struct Requirement {
    enum class Kind { click, no_click, exactly, unmeasured };
    Kind kind = Kind::unmeasured;
    int count = 0; ///< used by `exactly`

    static Requirement click() { return {Kind::click, 0}; }
    static Requirement no_click() { return {Kind::no_click, 0}; }
    static Requirement exactly(int n) { return {Kind::exactly, n}; }
    static Requirement unmeasured() { return {Kind::unmeasured, 0}; }

    friend bool operator==(const Requirement &, const Requirement &) = default;
};

/// One measured (or unmeasured) mode of a pattern.
struct HeraldEntry {
    std::string mode;
    Requirement requirement;
    DetectorModel detector;
};

/// Requirements per mode. At least one entry must be measured.
class HeraldPattern {
  public:
    explicit HeraldPattern(std::vector<HeraldEntry> entries);

    const std::vector<HeraldEntry> &entries() const noexcept { return entries_; }

  private:
    std::vector<HeraldEntry> entries_;
};

/// POVM elements of a detector: {off, on} for on-off, {E_0, ..., E_{d-1}}
/// for number-resolving. Every element is diagonal in the Fock basis.
std::vector<OperatorMatrix> povm_elements(const DetectorModel &detector,
                                          Cutoff cutoff,
                                          const std::string &mode = "a");

/// Diagonal of the POVM element selected by `req`. `unmeasured` yields the
/// identity. Throws ParameterError for `exactly` on an on-off detector.
std::vector<double> outcome_diagonal(const Requirement &req,
                                     const DetectorModel &detector,
                                     Cutoff cutoff);

OperatorMatrix outcome_element(const Requirement &req,
                               const DetectorModel &detector, Cutoff cutoff,
                               const std::string &mode);

/// Conditional (unnormalized) state after a POVM outcome on `mode`; the
/// measured mode is traced out. `probability` is Tr[E rho] for the
/// (possibly unnormalized) input, which is also the returned state's weight.
struct Conditioned {
    std::variant<PureState, MixedState> state;
    double probability;

    bool is_pure() const { return std::holds_alternative<PureState>(state); }
    const PureState &pure() const { return std::get<PureState>(state); }
    const MixedState &mixed() const { return std::get<MixedState>(state); }
    /// Density-matrix view regardless of representation.
    MixedState as_mixed() const;
};

/// For a pure state and a rank-one Fock projector the pure branch
/// <n|_mode psi> is returned; otherwise a density matrix.
/// Throws ZeroProbabilityError when the outcome weight is zero.
Conditioned condition(const PureState &state, const std::string &mode,
                      const OperatorMatrix &povm_element);
Conditioned condition(const MixedState &state, const std::string &mode,
                      const OperatorMatrix &povm_element);

/// <n|_mode psi> without the zero-probability check.
PureState project_level(const PureState &state, const std::string &mode,
                        int level);

/// Tr[rho (x)_i E_i]; unmeasured modes contribute the identity.
double pattern_probability(const MixedState &state, const HeraldPattern &pattern);
double pattern_probability(const PureState &state, const HeraldPattern &pattern);

/// P(joint | given) = pattern_probability(joint) / pattern_probability(given).
/// Throws ZeroProbabilityError when the conditioning probability is zero.
double conditional_probability(const MixedState &state,
                               const HeraldPattern &joint,
                               const HeraldPattern &given);

} // namespace qoptics
