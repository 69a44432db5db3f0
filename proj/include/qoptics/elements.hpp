#pragma once

#include <string>

#include "qoptics/fock.hpp"

namespace qoptics {

/// Lossless beam splitter. `T` is the intensity transmittivity; the
/// conjugation contract is
///
///     U x U^dag = t x + r y,    U y U^dag = t y - r x
///
/// with x the transmitted and y the reflected mode, t = sqrt(T), r = sqrt(1-T).
struct BeamSplitterParams {
    double T;
    std::string transmitted;
    std::string reflected;

    BeamSplitterParams(double T, std::string transmitted, std::string reflected);

    double t() const;
    double r() const;
};

/// Two-mode squeezer exp(-s a^dag d^dag + s a d) on (signal, idler).
/// S a S^dag = mu a + nu d^dag with mu = cosh s, nu = sinh s.
struct SqueezerParams {
    double s;
    std::string signal;
    std::string idler;

    SqueezerParams(double s, std::string signal, std::string idler);

    double mu() const;
    double nu() const;
    double lambda() const;
};

PureState fock_state(int n, Cutoff cutoff, std::string mode = "a");
PureState vacuum(Cutoff cutoff, std::string mode = "a");

/// Coherent amplitudes e^{-|a|^2/2} a^n / sqrt(n!), renormalized over the
/// retained levels. Warns when |alpha|^2 > d/4.
PureState coherent_state(cplx alpha, Cutoff cutoff, std::string mode = "a");
/// Probability mass of |alpha> above level d-1.
double coherent_tail(cplx alpha, Cutoff cutoff);

/// Geometric distribution nbar^n / (nbar+1)^{n+1}, renormalized.
MixedState thermal_state(double nbar, Cutoff cutoff, std::string mode = "a");
double thermal_tail(double nbar, Cutoff cutoff);

OperatorMatrix beam_splitter_unitary(const BeamSplitterParams &params,
                                     Cutoff cutoff);
OperatorMatrix two_mode_squeezer_unitary(const SqueezerParams &params,
                                         Cutoff cutoff);

} // namespace qoptics
