#pragma once

/**
 * @file
 * `qoc` command-line front end.
 *
 *     qoc run <fig1 | file.qoc> [options]
 *     qoc verify-commutation [options]
 *     qoc wigner [options]
 *     qoc sweep [options]
 *
 * Exit codes: 0 success, 1 parse, validation or I/O error (and a failed
 * verification), 2 numerical failure (leak budget, impossible herald).
 * Artifacts go to --out, else $QOC_OUT_DIR, else the working directory.
 */

#include <ostream>
#include <string>
#include <vector>

namespace qoptics {

/// `args` excludes the program name.
int run_cli(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err);

} // namespace qoptics
