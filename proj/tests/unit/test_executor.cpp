#include <doctest.h>

#include <random>

#include "qoptics/elements.hpp"
#include "qoptics/executor.hpp"
#include "qoptics/scheme.hpp"
#include "brute_force.hpp"
#include "random_circuit.hpp"

using namespace qoptics;

namespace {

double max_abs(const Matrix &m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("staged execution matches the brute-force evaluator") {
    std::mt19937 rng(20240611);
    testing::RandomCircuitOptions opt;
    opt.max_modes = 3;
    opt.max_alpha = 1.0;
    opt.max_nbar = 0.5;
    opt.max_fock = 2;
    int done = 0;
    while (done < 10) {
        const CircuitSpec spec = testing::random_circuit(rng, opt);
        const Cutoff d(6);
        testing::BruteForceResult ref{to_mixed(vacuum(d)), 0.0};
        try {
            ref = testing::brute_force(spec, d);
        } catch (const ZeroProbabilityError &) {
            continue;
        }
        if (ref.weight < 1e-8)
            continue;
        ++done;
        const ExecutionResult res = execute(compile(spec, CutoffPolicy{6, 1.0}));
        INFO(print_circuit(spec));
        CHECK(res.herald_weight == doctest::Approx(ref.weight).epsilon(1e-10));
        CHECK(std::abs(res.herald_weight - ref.weight) < 1e-10);

        std::vector<std::string> order = ref.state.modes();
        const MixedState got = res.final_state.reduced(order);
        CHECK(max_abs(got.matrix() - ref.state.matrix()) < 1e-10);

        for (const auto &out : res.outputs) {
            if (out.request.kind == OutputRequest::Kind::fidelity) {
                const MixedState red = partial_trace(ref.state, {out.request.mode});
                const double want = input_fidelity(spec.input_of(out.request.mode), red);
                CHECK(std::abs(std::get<double>(out.value) - want) < 1e-10);
            }
            if (out.request.kind == OutputRequest::Kind::probs) {
                const auto &rep = std::get<ProbabilityReport>(out.value);
                for (const auto &[mode, dist] : rep.marginals) {
                    const auto want = number_distribution(ref.state, mode);
                    for (std::size_t n = 0; n < dist.size(); ++n)
                        CHECK(std::abs(dist[n] - want[n] / ref.weight) < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("ensemble operations") {
    const Cutoff d(4);
    Ensemble e({}, d);
    CHECK(e.weight() == doctest::Approx(1.0));
    e.join("a", {fock_state(1, d).amplitudes()});
    e.join("b", {vacuum(d).amplitudes()});
    CHECK(e.is_pure());
    e.apply(beam_splitter_unitary(BeamSplitterParams(0.5, "a", "b"), d));
    e.condition("b", {0.0, 1.0, 1.0, 1.0});
    CHECK(e.weight() == doctest::Approx(0.5));
    e.trace("b");
    CHECK(e.modes() == std::vector<std::string>{"a"});
    CHECK(e.number_distribution("a")[0] == doctest::Approx(0.5));
    CHECK_THROWS_AS(e.join("a", {vacuum(d).amplitudes()}), DimensionError);

    SUBCASE("compaction keeps the density matrix") {
        Ensemble m({}, d);
        std::vector<Vector> comps;
        for (int n = 0; n < 4; ++n)
            comps.push_back(0.5 * fock_state(n, d).amplitudes());
        m.join("a", comps);
        m.join("b", comps);
        const Matrix before = m.to_mixed().matrix();
        CHECK(m.size() <= m.dim());
        m.compact();
        CHECK(max_abs(m.to_mixed().matrix() - before) < 1e-14);
    }
}

TEST_CASE("leak budget and doubling") {
    const CircuitSpec spec = build_fig1_circuit({});
    CHECK_THROWS_AS(execute(compile(spec, CutoffPolicy{4, 1e-6})), LeakBudgetError);
    try {
        execute(compile(spec, CutoffPolicy{4, 1e-6}));
    } catch (const LeakBudgetError &e) {
        CHECK(e.cutoff() == 4);
        CHECK(e.leak() > e.budget());
        CHECK(std::string(e.what()).find("larger cutoff") != std::string::npos);
    }
    SchemeParams thermal;
    thermal.input = InputSpec::thermal(1.0);
    const ExecutionResult r = run_circuit(build_fig1_circuit(thermal));
    CHECK(r.cutoff == 32);
    CHECK(r.max_leak <= 1e-6);
}

TEST_CASE("impossible herald") {
    CircuitSpec spec;
    spec.modes = {"a", "b"};
    spec.inputs = {{"a", InputSpec::make_vacuum()}, {"b", InputSpec::make_vacuum()}};
    spec.statements = {BeamSplitterStatement{"a", "b", 0.5},
                       HeraldStatement{"b", Requirement::click(), {}}};
    spec.outputs = {{OutputRequest::Kind::probs, "", {}}};
    CHECK_THROWS_AS(run_circuit(spec), ZeroProbabilityError);
}

TEST_CASE("Wigner engines agree through the executor") {
    SchemeParams p;
    p.cutoff.fixed = 16;
    CircuitSpec spec = build_fig1_circuit(p, Branch::pd1);
    spec.outputs = {{OutputRequest::Kind::wigner, "a", Axis(-2, 2, 9)}};
    const auto a = run_circuit(spec, p.cutoff, WignerEngine::laguerre);
    const auto b = run_circuit(spec, p.cutoff, WignerEngine::displaced_parity);
    const auto &ga = std::get<WignerGrid>(a.outputs[0].value);
    const auto &gb = std::get<WignerGrid>(b.outputs[0].value);
    CHECK((ga.values - gb.values).cwiseAbs().maxCoeff() < 1e-8);
}
