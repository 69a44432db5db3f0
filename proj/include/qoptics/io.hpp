#pragma once

/**
 * @file
 * Serialization of states, Wigner grids and report tables.
 *
 * State JSON:
 *
 *     {"modes": [...], "cutoff": d, "kind": "pure" | "mixed",
 *      "data": [[re, im], ...]}
 *
 * `data` holds the amplitudes (pure) or the density matrix in row-major
 * order (mixed), flat indices as in fock.hpp.
 *
 * Wigner CSV has a `re,im,W` header and one row per grid point with the
 * imaginary axis outermost. Numbers use the shortest round-trip form, so a
 * grid reloads bit for bit.
 */

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qoptics/executor.hpp"
#include "qoptics/phasespace.hpp"

namespace qoptics {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

nlohmann::json state_to_json(const PureState &state);
nlohmann::json state_to_json(const MixedState &state);
nlohmann::json state_to_json(const FinalState &state);
/// Throws ParameterError on malformed input.
FinalState state_from_json(const nlohmann::json &j);

std::string wigner_to_csv(const WignerGrid &grid);
WignerGrid wigner_from_csv(std::string_view text);
nlohmann::json wigner_to_json(const WignerGrid &grid);
WignerGrid wigner_from_json(const nlohmann::json &j);

/// Named columns of numbers or strings, written as a JSON array of objects
/// or as CSV with the same columns.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::json>> rows;

    void add(std::vector<nlohmann::json> row);
    nlohmann::json to_json() const;
    std::string to_csv() const;
};

nlohmann::json probabilities_to_json(const ProbabilityReport &report);

void write_text(const std::string &path, std::string_view text);
std::string read_text(const std::string &path);

} // namespace qoptics
