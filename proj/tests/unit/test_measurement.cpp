#include <doctest.h>

#include <cmath>
#include <random>

#include "qoptics/elements.hpp"
#include "qoptics/measurement.hpp"

using namespace qoptics;

namespace {

MixedState random_diagonal(Cutoff d, std::mt19937 &rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd p(d.dim());
    for (auto &x : p)
        x = u(rng);
    p /= p.sum();
    return MixedState(ModeSpace({"a"}, d), p.cast<cplx>().asDiagonal().toDenseMatrix());
}

double click_probability(const MixedState &rho, double eta) {
    return pattern_probability(
        rho, HeraldPattern({{"a", Requirement::click(), DetectorModel::on_off(eta)}}));
}

} // namespace

TEST_CASE("POVM elements") {
    const Cutoff d(8);
    SUBCASE("ideal on-off") {
        const auto e = povm_elements(DetectorModel::on_off(1.0), d);
        REQUIRE(e.size() == 2);
        Matrix vac = Matrix::Zero(8, 8);
        vac(0, 0) = 1.0;
        CHECK((e[0].matrix() - vac).norm() < 1e-15);
    }
    SUBCASE("lossy on-off") {
        const auto e = povm_elements(DetectorModel::on_off(0.45), d);
        CHECK(e[1].matrix()(1, 1).real() == doctest::Approx(0.45));
        CHECK(e[0].matrix()(3, 3).real() == doctest::Approx(std::pow(0.55, 3)));
    }
    SUBCASE("completeness") {
        for (const DetectorModel &m :
             {DetectorModel::on_off(1.0), DetectorModel::on_off(0.3),
              DetectorModel::resolving(1.0), DetectorModel::resolving(0.45),
              DetectorModel::resolving(0.0)}) {
            Matrix sum = Matrix::Zero(8, 8);
            for (const auto &e : povm_elements(m, d))
                sum += e.matrix();
            CHECK((sum - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    SUBCASE("binomial thinning") {
        const auto e = povm_elements(DetectorModel::resolving(0.6), d);
        REQUIRE(e.size() == 8);
        CHECK(e[2].matrix()(4, 4).real() ==
              doctest::Approx(6 * 0.36 * 0.16).epsilon(1e-12));
        CHECK(e[5].matrix()(4, 4).real() == 0.0);
    }
    SUBCASE("efficiency range") {
        CHECK_THROWS_AS(DetectorModel::on_off(1.5), ParameterError);
        CHECK_THROWS_AS(DetectorModel::resolving(-0.1), ParameterError);
    }
    SUBCASE("exactly needs a resolving detector") {
        CHECK_THROWS_AS(outcome_diagonal(Requirement::exactly(1), DetectorModel::on_off(1.0), d),
                        ParameterError);
    }
}

TEST_CASE("condition") {
    SUBCASE("vacuum on no-click") {
        const Cutoff d(4);
        const PureState psi = tensor(fock_state(1, d, "a"), vacuum(d, "b"));
        const Conditioned c =
            condition(psi, "b", outcome_element(Requirement::no_click(), DetectorModel::on_off(1.0), d, "b"));
        CHECK(c.probability == doctest::Approx(1.0));
        CHECK(c.as_mixed().matrix()(1, 1).real() == doctest::Approx(1.0));
    }
    SUBCASE("idler of a squeezed vacuum") {
        const Cutoff d(12);
        const SqueezerParams p(0.1, "a", "d");
        const PureState out =
            apply(two_mode_squeezer_unitary(p, d), tensor(vacuum(d, "a"), vacuum(d, "d")));
        const Conditioned c = condition(out, "d", outcome_element(Requirement::exactly(1), {}, d, "d"));
        REQUIRE(c.is_pure());
        const double want = p.lambda() * p.lambda() / (p.mu() * p.mu());
        CHECK(c.probability == doctest::Approx(want).epsilon(1e-10));
        CHECK(want == doctest::Approx(9.83e-3).epsilon(1e-3));
        CHECK(std::norm(c.pure().amplitudes()[1]) / c.probability ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("reflected photon from a coherent state") {
        const Cutoff d(20);
        const BeamSplitterParams p(0.99, "a", "b");
        const PureState out = apply(beam_splitter_unitary(p, d),
                                    tensor(coherent_state(1.0, d, "a"), vacuum(d, "b")));
        const Conditioned c = condition(out, "b", outcome_element(Requirement::exactly(1), {}, d, "b"));
        const PureState target = apply(annihilation_matrix(d), coherent_state(p.t(), d));
        const double f = std::norm(inner_product(target, c.pure())) /
                         (target.weight() * c.pure().weight());
        CHECK(f > 1.0 - 1e-10);
    }
    SUBCASE("zero probability is signaled") {
        const Cutoff d(4);
        const PureState psi = tensor(vacuum(d, "a"), vacuum(d, "b"));
        CHECK_THROWS_AS(condition(psi, "b", outcome_element(Requirement::exactly(2), {}, d, "b")),
                        ZeroProbabilityError);
    }
    SUBCASE("probabilities over a complete outcome set sum to the weight") {
        std::mt19937 rng(3);
        std::normal_distribution<double> g;
        const Cutoff d(5);
        const ModeSpace sp({"a", "b"}, d);
        Vector v(25);
        for (auto &x : v)
            x = cplx(g(rng), g(rng));
        const PureState psi(sp, 0.7 * v / v.norm());
        for (const DetectorModel &m : {DetectorModel::on_off(0.45), DetectorModel::resolving(0.8)}) {
            double total = 0.0;
            for (const auto &e : povm_elements(m, d, "b")) {
                try {
                    total += condition(psi, "b", e).probability;
                } catch (const ZeroProbabilityError &) {
                }
            }
            CHECK(total == doctest::Approx(psi.weight()).epsilon(1e-10));
        }
    }
    SUBCASE("ideal click equals the complement of the vacuum projector") {
        const Cutoff d(6);
        const MixedState rho = thermal_state(0.8, d);
        const double click = click_probability(rho, 1.0);
        CHECK(click == doctest::Approx(1.0 - rho.matrix()(0, 0).real()).epsilon(1e-14));
    }
}

TEST_CASE("pattern probability") {
    const Cutoff d(5);
    const MixedState rho = tensor(thermal_state(0.5, d, "a"), thermal_state(0.2, d, "b"));
    SUBCASE("all unmeasured") {
        const HeraldPattern all({{"a", Requirement::unmeasured(), {}}, {"b", Requirement::unmeasured(), {}}});
        CHECK(pattern_probability(rho, all) == doctest::Approx(1.0));
    }
    SUBCASE("product of marginals") {
        const HeraldPattern both({{"a", Requirement::click(), DetectorModel::on_off(1.0)},
                                  {"b", Requirement::click(), DetectorModel::on_off(1.0)}});
        const HeraldPattern only_b({{"b", Requirement::click(), DetectorModel::on_off(1.0)}});
        const double p_a = 1.0 - partial_trace(rho, {"a"}).matrix()(0, 0).real();
        CHECK(conditional_probability(rho, both, only_b) == doctest::Approx(p_a).epsilon(1e-12));
    }
    SUBCASE("conditioning on an impossible event") {
        const MixedState vac = tensor(to_mixed(vacuum(d, "a")), to_mixed(vacuum(d, "b")));
        const HeraldPattern both({{"a", Requirement::click(), DetectorModel::on_off(1.0)},
                                  {"b", Requirement::click(), DetectorModel::on_off(1.0)}});
        const HeraldPattern only_b({{"b", Requirement::click(), DetectorModel::on_off(1.0)}});
        CHECK_THROWS_AS(conditional_probability(vac, both, only_b), ZeroProbabilityError);
    }
    SUBCASE("unknown mode") {
        const HeraldPattern z({{"z", Requirement::click(), DetectorModel::on_off(1.0)}});
        CHECK_THROWS_AS(pattern_probability(rho, z), UnknownModeError);
    }
}

TEST_CASE("click probability is nondecreasing in efficiency") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const MixedState rho = random_diagonal(Cutoff(7), rng);
        double prev = -1.0;
        for (int k = 0; k <= 20; ++k) {
            const double p = click_probability(rho, k / 20.0);
            CHECK(p >= prev - 1e-15);
            prev = p;
        }
    }
}

TEST_CASE("inefficient detector equals a loss beam splitter before an ideal one") {
    const Cutoff d(6);
    const double eta = 0.45;
    std::mt19937 rng(9);
    std::normal_distribution<double> g;
    Vector v(36);
    for (auto &x : v)
        x = cplx(g(rng), g(rng));
    const PureState psi(ModeSpace({"a", "b"}, d), v / v.norm());

    const PureState dilated =
        apply(beam_splitter_unitary(BeamSplitterParams(eta, "b", "l"), d), tensor(psi, vacuum(d, "l")));

    SUBCASE("on-off") {
        for (const Requirement req : {Requirement::click(), Requirement::no_click()}) {
            const Conditioned lossy =
                condition(psi, "b", outcome_element(req, DetectorModel::on_off(eta), d, "b"));
            const Conditioned ideal =
                condition(dilated, "b", outcome_element(req, DetectorModel::on_off(1.0), d, "b"));
            const MixedState ref = partial_trace(ideal.as_mixed(), {"a"});
            CHECK(lossy.probability == doctest::Approx(ideal.probability).epsilon(1e-12));
            CHECK((lossy.as_mixed().matrix() - ref.matrix()).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    SUBCASE("number resolving") {
        for (int k = 0; k < 4; ++k) {
            const Requirement req = Requirement::exactly(k);
            const Conditioned lossy =
                condition(psi, "b", outcome_element(req, DetectorModel::resolving(eta), d, "b"));
            const Conditioned ideal = condition(dilated, "b", outcome_element(req, {}, d, "b"));
            const MixedState ref = partial_trace(ideal.as_mixed(), {"a"});
            CHECK(lossy.probability == doctest::Approx(ideal.probability).epsilon(1e-12));
            CHECK((lossy.as_mixed().matrix() - ref.matrix()).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}
