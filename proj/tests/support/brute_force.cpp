#include "brute_force.hpp"

#include "qoptics/elements.hpp"
#include "qoptics/executor.hpp"
#include "qoptics/measurement.hpp"

namespace qoptics::testing {

BruteForceResult brute_force(const CircuitSpec &spec, Cutoff d) {
    MixedState rho = input_state(spec.input_of(spec.modes[0]), d, spec.modes[0]);
    for (std::size_t i = 1; i < spec.modes.size(); ++i)
        rho = tensor(rho, input_state(spec.input_of(spec.modes[i]), d, spec.modes[i]));
    double weight = 1.0;
    for (const auto &st : spec.statements) {
        if (const auto *bs = std::get_if<BeamSplitterStatement>(&st)) {
            const auto u = beam_splitter_unitary(
                BeamSplitterParams(bs->T, bs->transmitted, bs->reflected), d);
            rho = apply(embed(u, rho.space()), rho);
        } else if (const auto *sq = std::get_if<SqueezerStatement>(&st)) {
            const auto u = two_mode_squeezer_unitary(
                SqueezerParams(sq->s, sq->signal, sq->idler), d);
            rho = apply(embed(u, rho.space()), rho);
        } else {
            const auto &h = std::get<HeraldStatement>(st);
            const Conditioned c = condition(
                rho, h.mode, outcome_element(h.requirement, h.detector, d, h.mode));
            weight = c.probability;
            rho = c.as_mixed();
        }
    }
    return {rho, weight};
}

} // namespace qoptics::testing
