#pragma once

/**
 * @file
 * Line-oriented circuit description format (.qoc).
 *
 *     # comment
 *     modes a b c d
 *     input a coherent <re> <im> | thermal <nbar> | fock <n> | vacuum
 *     bs <m1> <m2> T=<float>          (m1 transmitted, m2 reflected)
 *     tmsq <m1> <m2> s=<float>        (m1 signal, m2 idler)
 *     herald <mode> click|noclick|exactly <n> [eta=<float>] [onoff]
 *     out wigner <mode> <min>:<max>:<count>
 *     out fidelity <mode> input
 *     out probs
 *     out state
 *
 * Heralds are destructive: the mode is traced out afterwards and may not be
 * referenced again. The printer emits a canonical form; comments are not
 * preserved.
 */

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qoptics/measurement.hpp"
#include "qoptics/phasespace.hpp"

namespace qoptics {

/// Product-state input of one mode.
struct InputSpec {
    enum class Kind { vacuum, coherent, thermal, fock };
    Kind kind = Kind::vacuum;
    std::complex<double> alpha{};
    double nbar = 0.0;
    int n = 0;

    static InputSpec make_vacuum() { return {}; }
    static InputSpec coherent(std::complex<double> alpha) {
        return {Kind::coherent, alpha, 0.0, 0};
    }
    static InputSpec thermal(double nbar) { return {Kind::thermal, {}, nbar, 0}; }
    static InputSpec fock(int n) { return {Kind::fock, {}, 0.0, n}; }

    /// Smallest cutoff the default policy would pick for this input alone.
    int suggested_cutoff() const;

    friend bool operator==(const InputSpec &, const InputSpec &) = default;
};

struct InputStatement {
    std::string mode;
    InputSpec input;
    friend bool operator==(const InputStatement &, const InputStatement &) = default;
};

struct BeamSplitterStatement {
    std::string transmitted;
    std::string reflected;
    double T = 0.5;
    friend bool operator==(const BeamSplitterStatement &,
                           const BeamSplitterStatement &) = default;
};

struct SqueezerStatement {
    std::string signal;
    std::string idler;
    double s = 0.0;
    friend bool operator==(const SqueezerStatement &,
                           const SqueezerStatement &) = default;
};

struct HeraldStatement {
    std::string mode;
    Requirement requirement;
    DetectorModel detector;
    friend bool operator==(const HeraldStatement &, const HeraldStatement &) = default;
};

using Statement =
    std::variant<BeamSplitterStatement, SqueezerStatement, HeraldStatement>;

struct OutputRequest {
    enum class Kind { wigner, fidelity, probs, state };
    Kind kind = Kind::probs;
    std::string mode;  ///< wigner, fidelity
    Axis axis;         ///< wigner: same axis for Re and Im

    friend bool operator==(const OutputRequest &, const OutputRequest &) = default;
};

struct CircuitSpec {
    std::vector<std::string> modes;
    std::vector<InputStatement> inputs;
    std::vector<Statement> statements;
    std::vector<OutputRequest> outputs;

    const InputSpec &input_of(const std::string &mode) const;

    friend bool operator==(const CircuitSpec &, const CircuitSpec &) = default;
};

enum class ParseErrorCode {
    no_modes,
    duplicate_modes,
    statement_before_modes,
    unknown_keyword,
    undeclared_mode,
    duplicate_input,
    missing_input,
    malformed_number,
    invalid_value,
    missing_argument,
    unexpected_token,
    modes_must_differ,
    duplicate_herald,
    mode_already_measured,
    onoff_exact,
    no_outputs,
};

std::string_view to_string(ParseErrorCode code);

struct ParseError {
    int line = 0;    ///< 1-based
    int column = 0;  ///< 1-based; 0 when the error concerns the whole file
    ParseErrorCode code = ParseErrorCode::unknown_keyword;
    std::string message;

    std::string format() const;
};

struct ParseResult {
    std::optional<CircuitSpec> spec;
    std::vector<ParseError> errors;

    bool ok() const { return spec.has_value(); }
};

/// Never throws; every problem is reported as a ParseError.
ParseResult parse_circuit(std::string_view text);

/// Semantic checks shared by the parser and programmatic builders.
std::vector<ParseError> validate(const CircuitSpec &spec);

/// Canonical text; parse_circuit(print_circuit(s)).spec == s.
std::string print_circuit(const CircuitSpec &spec);

} // namespace qoptics
