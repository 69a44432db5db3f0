#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "qoptics/elements.hpp"
#include "qoptics/io.hpp"

using namespace qoptics;

TEST_CASE("format_double round-trips") {
    for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 6.02214076e23, 4.9e-324, -1e-300})
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("state JSON round-trips bit for bit") {
    const Cutoff d(5);
    const PureState pure = tensor(coherent_state(cplx(0.3, -0.7), d, "a"), fock_state(1, d, "b"));
    const FinalState p2 = state_from_json(state_to_json(pure));
    REQUIRE(std::holds_alternative<PureState>(p2));
    CHECK(std::get<PureState>(p2).modes() == pure.modes());
    CHECK(std::get<PureState>(p2).amplitudes() == pure.amplitudes());

    const MixedState mixed = thermal_state(0.8, d, "x");
    const FinalState m2 = state_from_json(state_to_json(mixed));
    REQUIRE(std::holds_alternative<MixedState>(m2));
    CHECK(std::get<MixedState>(m2).matrix() == mixed.matrix());

    const auto j = state_to_json(mixed);
    CHECK(j["kind"] == "mixed");
    CHECK(j["cutoff"] == 5);
    CHECK(j["data"].size() == 25);

    CHECK_THROWS_AS(state_from_json(nlohmann::json{{"modes", {"a"}}}), ParameterError);
    nlohmann::json bad = j;
    bad["data"].erase(0);
    CHECK_THROWS_AS(state_from_json(bad), ParameterError);
}

TEST_CASE("Wigner grid round-trips through CSV and JSON") {
    const WignerGrid g = wigner(to_mixed(coherent_state(cplx(0.4, 0.1), Cutoff(15))),
                                Axis(-2, 2, 7), Axis(-1.5, 1.0, 5));
    const WignerGrid c = wigner_from_csv(wigner_to_csv(g));
    CHECK(c.re == g.re);
    CHECK(c.im == g.im);
    CHECK(c.values == g.values);
    const WignerGrid j = wigner_from_json(wigner_to_json(g));
    CHECK(j.re == g.re);
    CHECK(j.im == g.im);
    CHECK(j.values == g.values);

    const std::string csv = wigner_to_csv(g);
    CHECK(csv.rfind("re,im,W\n", 0) == 0);
    CHECK_THROWS_AS(wigner_from_csv("re,im,W\n0,0,x\n"), ParameterError);
}

TEST_CASE("tables") {
    Table t{{"alpha", "name"}, {}};
    t.add({1.5, "x"});
    t.add({0.1, "y,z"});
    CHECK(t.to_json()[1]["alpha"] == 0.1);
    CHECK(t.to_csv() == "alpha,name\n1.5,x\n0.1,\"y,z\"\n");
    CHECK_THROWS_AS(t.add({1.0}), DimensionError);
}

TEST_CASE("files") {
    const auto dir = std::filesystem::temp_directory_path() / "qoptics_io_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "x.txt").string();
    write_text(path, "hello\n");
    CHECK(read_text(path) == "hello\n");
    CHECK_THROWS_WITH_AS(read_text((dir / "missing").string()),
                         doctest::Contains("file not found"), Error);
    std::filesystem::remove_all(dir);
}
