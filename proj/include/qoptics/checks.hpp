#pragma once

/**
 * @file
 * Operator-level identities of the truncated algebra. Each function returns
 * the largest absolute deviation found.
 */

namespace qoptics {

/// |[a, a^dag] - diag(1, ..., 1, -(d-1))|.
double commutator_defect(int d);

/// U x U^dag - (t x + r y) and U y U^dag - (t y - r x), compared on states
/// whose total photon number is below the top level.
double beam_splitter_conjugation_defect(double T, int d);

/// S a S^dag - (mu a + nu d^dag), compared on states with at most d/2
/// photons per mode.
double squeezer_conjugation_defect(double s, int d);

/// |1,1> through a 50:50 beam splitter against (|2,0> - |0,2>)/sqrt2, up to
/// a global phase.
double hom_defect(int d = 4);

} // namespace qoptics
