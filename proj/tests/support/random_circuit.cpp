#include "random_circuit.hpp"

#include <algorithm>

namespace qoptics::testing {

namespace {

double uniform(std::mt19937 &rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int pick(std::mt19937 &rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

InputSpec random_input(std::mt19937 &rng, const RandomCircuitOptions &opt) {
    switch (pick(rng, 0, 3)) {
    case 0: return InputSpec::make_vacuum();
    case 1: {
        const double r = uniform(rng, 0.0, opt.max_alpha);
        const double phi = uniform(rng, -3.1, 3.1);
        return InputSpec::coherent(std::polar(r, phi));
    }
    case 2: return InputSpec::thermal(uniform(rng, 0.0, opt.max_nbar));
    default: return InputSpec::fock(pick(rng, 0, opt.max_fock));
    }
}

HeraldStatement random_herald(std::mt19937 &rng, const std::string &mode) {
    HeraldStatement h{mode, Requirement::click(), {}};
    const double eta = pick(rng, 0, 1) ? 1.0 : uniform(rng, 0.3, 1.0);
    if (pick(rng, 0, 1)) {
        h.detector = DetectorModel::on_off(eta);
        h.requirement = pick(rng, 0, 1) ? Requirement::click() : Requirement::no_click();
    } else {
        h.detector = DetectorModel::resolving(eta);
        switch (pick(rng, 0, 2)) {
        case 0: h.requirement = Requirement::click(); break;
        case 1: h.requirement = Requirement::no_click(); break;
        default: h.requirement = Requirement::exactly(pick(rng, 0, 1)); break;
        }
    }
    return h;
}

} // namespace

CircuitSpec random_circuit(std::mt19937 &rng, const RandomCircuitOptions &opt) {
    CircuitSpec spec;
    const int m = pick(rng, opt.min_modes, opt.max_modes);
    static const char *names[] = {"a", "b", "c", "d", "idler", "sig_2"};
    for (int i = 0; i < m; ++i)
        spec.modes.push_back(names[i]);
    for (const auto &mode : spec.modes)
        spec.inputs.push_back({mode, random_input(rng, opt)});
    std::shuffle(spec.inputs.begin(), spec.inputs.end(), rng);

    std::vector<std::string> live = spec.modes;
    const int n = pick(rng, 1, opt.max_statements);
    for (int k = 0; k < n && !live.empty(); ++k) {
        const int kind = live.size() >= 2 ? pick(rng, 0, 4) : 4;
        if (kind <= 1 || kind == 3) {
            std::vector<std::string> two = live;
            std::shuffle(two.begin(), two.end(), rng);
            if (kind == 3)
                spec.statements.push_back(
                    SqueezerStatement{two[0], two[1], uniform(rng, 0.0, 0.15)});
            else
                spec.statements.push_back(
                    BeamSplitterStatement{two[0], two[1], uniform(rng, 0.05, 1.0)});
        } else if (live.size() >= 2) {
            const std::size_t idx = static_cast<std::size_t>(pick(rng, 0, static_cast<int>(live.size()) - 1));
            spec.statements.push_back(random_herald(rng, live[idx]));
            live.erase(live.begin() + static_cast<std::ptrdiff_t>(idx));
        }
    }

    spec.outputs.push_back({OutputRequest::Kind::probs, "", {}});
    if (!live.empty()) {
        const std::string &mode = live[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(live.size()) - 1))];
        spec.outputs.push_back({OutputRequest::Kind::fidelity, mode, {}});
        if (opt.wigner_outputs) {
            const double half = uniform(rng, 1.0, 4.0);
            spec.outputs.push_back({OutputRequest::Kind::wigner, mode,
                                    Axis(-half, half, pick(rng, 2, 9))});
        }
    }
    spec.outputs.push_back({OutputRequest::Kind::state, "", {}});
    return spec;
}

} // namespace qoptics::testing
