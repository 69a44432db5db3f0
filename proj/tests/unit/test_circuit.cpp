#include <doctest.h>

#include <algorithm>
#include <random>

#include "qoptics/circuit.hpp"
#include "qoptics/executor.hpp"
#include "qoptics/io.hpp"
#include "qoptics/scheme.hpp"
#include "random_circuit.hpp"

using namespace qoptics;

namespace {

bool has_code(const ParseResult &r, ParseErrorCode code) {
    return std::any_of(r.errors.begin(), r.errors.end(),
                       [&](const ParseError &e) { return e.code == code; });
}

const char *minimal = "modes a b\n"
                      "input a coherent 1 0\n"
                      "input b vacuum\n"
                      "bs a b T=0.5\n"
                      "out probs\n";

} // namespace

TEST_CASE("parse a small circuit") {
    const ParseResult r = parse_circuit(minimal);
    REQUIRE(r.ok());
    const CircuitSpec &s = *r.spec;
    CHECK(s.modes == std::vector<std::string>{"a", "b"});
    CHECK(s.input_of("a") == InputSpec::coherent(1.0));
    REQUIRE(s.statements.size() == 1);
    const auto &bs = std::get<BeamSplitterStatement>(s.statements[0]);
    CHECK(bs.transmitted == "a");
    CHECK(bs.reflected == "b");
    CHECK(bs.T == 0.5);
}

TEST_CASE("parse every construct") {
    const char *text = "# header comment\n"
                       "modes a b c d   # trailing\n"
                       "input a thermal 0.5\n"
                       "input b fock 2\n"
                       "input c coherent -0.25 1e-1\n"
                       "input d vacuum\n"
                       "tmsq a d s=0.1\n"
                       "herald d exactly 1 eta=0.9\n"
                       "bs a c T=0.99\n"
                       "herald c click eta=0.45 onoff\n"
                       "herald b noclick\n"
                       "out wigner a -3:3:41\n"
                       "out fidelity a input\n"
                       "out probs\n"
                       "out state\n";
    const ParseResult r = parse_circuit(text);
    REQUIRE(r.ok());
    const CircuitSpec &s = *r.spec;
    CHECK(s.input_of("c") == InputSpec::coherent({-0.25, 0.1}));
    CHECK(s.input_of("b") == InputSpec::fock(2));
    const auto &h = std::get<HeraldStatement>(s.statements[3]);
    CHECK(h.detector == DetectorModel::on_off(0.45));
    CHECK(h.requirement == Requirement::click());
    CHECK(std::get<HeraldStatement>(s.statements[1]).requirement == Requirement::exactly(1));
    CHECK(s.outputs[0].axis == Axis(-3, 3, 41));
    CHECK(s.outputs.size() == 4);
}

TEST_CASE("parse errors") {
    SUBCASE("empty file") {
        const ParseResult r = parse_circuit("");
        CHECK_FALSE(r.ok());
        REQUIRE(has_code(r, ParseErrorCode::no_modes));
        CHECK(r.errors.front().message.find("no modes declared") != std::string::npos);
    }
    SUBCASE("identical beam splitter modes") {
        const ParseResult r = parse_circuit("modes a b\ninput a vacuum\ninput b vacuum\n"
                                            "bs a a T=0.5\nout probs\n");
        REQUIRE(has_code(r, ParseErrorCode::modes_must_differ));
        const auto &e = r.errors.front();
        CHECK(e.line == 4);
        CHECK(e.message.find("modes must differ") != std::string::npos);
    }
    SUBCASE("distinct codes") {
        CHECK(has_code(parse_circuit("modes a\ninput a vacuum\nfoo a\nout probs\n"),
                       ParseErrorCode::unknown_keyword));
        CHECK(has_code(parse_circuit("modes a\ninput a vacuum\nbs a z T=0.5\nout probs\n"),
                       ParseErrorCode::undeclared_mode));
        CHECK(has_code(parse_circuit("modes a\ninput a vacuum\ninput a vacuum\nout probs\n"),
                       ParseErrorCode::duplicate_input));
        CHECK(has_code(parse_circuit("modes a\ninput a thermal 1.2.3\nout probs\n"),
                       ParseErrorCode::malformed_number));
        CHECK(has_code(parse_circuit("modes a b\ninput a vacuum\nout probs\n"),
                       ParseErrorCode::missing_input));
        CHECK(has_code(parse_circuit("modes a\ninput a vacuum\n"), ParseErrorCode::no_outputs));
        CHECK(has_code(parse_circuit("modes a b\ninput a vacuum\ninput b vacuum\n"
                                     "herald b click\nbs a b T=0.5\nout probs\n"),
                       ParseErrorCode::mode_already_measured));
        CHECK(has_code(parse_circuit("modes a b\ninput a vacuum\ninput b vacuum\n"
                                     "herald b exactly 1 onoff\nout probs\n"),
                       ParseErrorCode::onoff_exact));
        CHECK(has_code(parse_circuit("modes a b\ninput a vacuum\ninput b vacuum\n"
                                     "bs a b T=1.5\nout probs\n"),
                       ParseErrorCode::invalid_value));
    }
    SUBCASE("columns point at the offending token") {
        const ParseResult r = parse_circuit("modes a b\ninput a vacuum\ninput b vacuum\n"
                                            "bs a   zz T=0.5\nout probs\n");
        REQUIRE_FALSE(r.errors.empty());
        CHECK(r.errors.front().line == 4);
        CHECK(r.errors.front().column == 8);
        CHECK(r.errors.front().format().find("line 4, column 8") != std::string::npos);
    }
}

TEST_CASE("random specs round-trip through the printer") {
    std::mt19937 rng(2024);
    for (int k = 0; k < 20; ++k) {
        const CircuitSpec spec = testing::random_circuit(rng);
        REQUIRE(validate(spec).empty());
        const std::string text = print_circuit(spec);
        const ParseResult r = parse_circuit(text);
        INFO(text);
        REQUIRE(r.ok());
        CHECK(*r.spec == spec);
        CHECK(print_circuit(*r.spec) == text);
    }
}

TEST_CASE("comments are not preserved") {
    const ParseResult r = parse_circuit(std::string("# note\n") + minimal);
    REQUIRE(r.ok());
    CHECK(print_circuit(*r.spec).find('#') == std::string::npos);
}

TEST_CASE("fuzzed token soup never crashes") {
    static const char *tokens[] = {
        "modes", "input", "bs", "tmsq", "herald", "out", "a", "b", "c", "T=0.5", "s=0.1",
        "T=", "eta=2", "coherent", "thermal", "fock", "vacuum", "1", "-1", "0.3e", "nan",
        "click", "noclick", "exactly", "onoff", "wigner", "fidelity", "probs", "state",
        "-3:3:41", "1:0:1", "::", "#", "\n", "\n", "\n", "\t", "input", "é", "1e999"};
    std::mt19937 rng(99);
    std::uniform_int_distribution<std::size_t> pick(0, std::size(tokens) - 1);
    for (int trial = 0; trial < 2000; ++trial) {
        std::string text;
        const int n = static_cast<int>(rng() % 40);
        for (int i = 0; i < n; ++i) {
            text += tokens[pick(rng)];
            text += ' ';
        }
        ParseResult r;
        CHECK_NOTHROW(r = parse_circuit(text));
        if (!r.ok()) {
            CHECK_FALSE(r.errors.empty());
            for (const auto &e : r.errors)
                CHECK(e.line >= 1);
        }
    }
}

TEST_CASE("fig1 built-in equals the shipped file") {
    const std::string text = read_text(QOPTICS_DATA_DIR "/fig1.qoc");
    const ParseResult r = parse_circuit(text);
    REQUIRE(r.ok());
    CHECK(*r.spec == build_fig1_circuit({}));
    CHECK(print_circuit(*r.spec) == text);
}

TEST_CASE("compile") {
    const CircuitSpec fig1 = build_fig1_circuit({});
    SUBCASE("fig1 has 4 unitaries and 3 herald points") {
        const ExecutionPlan plan = compile(fig1);
        const auto count = [&](PlanStep::Kind k) {
            return std::count_if(plan.steps.begin(), plan.steps.end(),
                                 [&](const PlanStep &s) { return s.kind == k; });
        };
        CHECK(count(PlanStep::Kind::unitary) == 4);
        CHECK(count(PlanStep::Kind::condition) == 3);
        CHECK(count(PlanStep::Kind::trace) == 3);
        for (std::size_t i = 0; i < plan.steps.size(); ++i)
            if (plan.steps[i].kind == PlanStep::Kind::condition) {
                REQUIRE(i + 1 < plan.steps.size());
                CHECK(plan.steps[i + 1].kind == PlanStep::Kind::trace);
                CHECK(plan.steps[i + 1].modes == plan.steps[i].modes);
            }
        CHECK(plan.cutoff == 12);
        CHECK(plan.may_double);
    }
    SUBCASE("no heralds, no condition steps") {
        const ExecutionPlan plan = compile(*parse_circuit(minimal).spec);
        for (const auto &s : plan.steps)
            CHECK(s.kind != PlanStep::Kind::condition);
    }
    SUBCASE("idempotent and deterministic") {
        std::mt19937 rng(5);
        for (int k = 0; k < 10; ++k) {
            const CircuitSpec spec = testing::random_circuit(rng);
            const ExecutionPlan direct = compile(spec);
            CHECK(compile(*parse_circuit(print_circuit(spec)).spec) == direct);
            CHECK(compile(spec) == direct);
        }
    }
    SUBCASE("fixed cutoff is honoured") {
        const ExecutionPlan plan = compile(fig1, CutoffPolicy{7, 1e-3});
        CHECK(plan.cutoff == 7);
        CHECK_FALSE(plan.may_double);
        CHECK(plan.leak_budget == 1e-3);
    }
    SUBCASE("untouched herald warns") {
        const ExecutionPlan plan =
            compile(*parse_circuit("modes a b\ninput a vacuum\ninput b fock 1\n"
                                   "herald b exactly 1\nout probs\n")
                         .spec);
        REQUIRE(plan.warnings.size() == 1);
        CHECK(plan.warnings[0].find("'b'") != std::string::npos);
    }
    SUBCASE("invalid spec is rejected") {
        CircuitSpec bad = fig1;
        bad.outputs.clear();
        CHECK_THROWS_AS(compile(bad), ParameterError);
    }
}

TEST_CASE("cutoff policy") {
    CircuitSpec s = *parse_circuit(minimal).spec;
    CHECK(CutoffPolicy{}.resolve(s) == 12);
    s.inputs[0].input = InputSpec::coherent(2.0);
    CHECK(CutoffPolicy{}.resolve(s) == 20);
    s.inputs[0].input = InputSpec::thermal(1.0);
    CHECK(CutoffPolicy{}.resolve(s) == 16);
    s.inputs[0].input = InputSpec::fock(3);
    CHECK(CutoffPolicy{}.resolve(s) == 16);
    CHECK(CutoffPolicy{5, 1e-6}.resolve(s) == 5);

    s.outputs.push_back({OutputRequest::Kind::wigner, s.modes[0], Axis()});
    CHECK(CutoffPolicy{}.resolve(s) == 32);
    s.inputs[0].input = InputSpec::coherent(1.0);
    CHECK(CutoffPolicy{}.resolve(s) == 24);
    s.inputs[0].input = InputSpec::coherent(2.0);
    CHECK(CutoffPolicy{}.resolve(s) == 40);
    CHECK(CutoffPolicy{10, 1e-6}.resolve(s) == 10);
}
