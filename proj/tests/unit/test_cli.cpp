#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "qoptics/cli.hpp"
#include "qoptics/io.hpp"

using namespace qoptics;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run qoc(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string &name)
        : path(fs::temp_directory_path() / ("qoc_cli_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string &f) const { return (path / f).string(); }
    std::string str() const { return path.string(); }
};

} // namespace

TEST_CASE("run fig1 writes a report") {
    TempDir dir("run");
    const Run r = qoc({"run", "fig1", "--alpha", "1", "--T", "0.99", "--s", "0.1", "--out", dir.str()});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(read_text(dir / "report.json"));
    REQUIRE(j.is_array());
    CHECK(j[0]["pd2_f_attenuated"].get<double>() > 0.9995);
    CHECK(j[0]["input"] == "coherent");

    const Run csv = qoc({"run", "fig1", "--format", "csv", "--out", dir.str()});
    REQUIRE(csv.code == 0);
    CHECK(read_text(dir / "report.csv").rfind("input,alpha,", 0) == 0);
}

TEST_CASE("run exit codes") {
    TempDir dir("codes");
    const Run missing = qoc({"run", dir / "missing.qoc", "--out", dir.str()});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("file not found") != std::string::npos);

    const Run leak = qoc({"run", "fig1", "--alpha", "1", "--cutoff", "4", "--out", dir.str()});
    CHECK(leak.code == 2);
    CHECK(leak.err.find("leak") != std::string::npos);

    write_text(dir / "bad.qoc", "modes a a\n");
    const Run bad = qoc({"run", dir / "bad.qoc", "--out", dir.str()});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("bad.qoc:1:") != std::string::npos);

    CHECK(qoc({"run", "fig1", "--T", "2", "--out", dir.str()}).code == 1);
    CHECK(qoc({"run", "fig1", "--alpha", "1", "--nbar", "1"}).code == 1);
    CHECK(qoc({"frobnicate"}).code == 1);
    CHECK(qoc({"run", "fig1", "--format", "xml"}).code == 1);

    write_text(dir / "ok.qoc", "modes a\ninput a vacuum\nout probs\n");
    CHECK(qoc({"run", dir / "ok.qoc", "--alpha", "1", "--out", dir.str()}).code == 1);
}

TEST_CASE("run a circuit file") {
    TempDir dir("file");
    write_text(dir / "c.qoc", "modes a b\ninput a fock 1\ninput b vacuum\n"
                              "bs a b T=0.5\nherald b noclick\n"
                              "out wigner a -2:2:5\nout fidelity a input\nout probs\nout state\n");
    const Run r = qoc({"run", dir / "c.qoc", "--out", dir.str()});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "wigner_a.json"));
    CHECK(fs::exists(dir / "state.json"));
    const FinalState st = state_from_json(nlohmann::json::parse(read_text(dir / "state.json")));
    CHECK(std::holds_alternative<PureState>(st));
}

TEST_CASE("output directory from the environment") {
    TempDir dir("env");
    setenv("QOC_OUT_DIR", dir.str().c_str(), 1);
    const Run r = qoc({"run", "fig1", "--cutoff", "16"});
    unsetenv("QOC_OUT_DIR");
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "report.json"));
}

TEST_CASE("verify-commutation") {
    TempDir dir("verify");
    const Run zero = qoc({"verify-commutation", "--alpha", "0", "--cutoff", "16", "--out", dir.str()});
    CHECK(zero.code == 0);
    CHECK(fs::exists(dir / "verify.json"));
    const Run flipped = qoc({"verify-commutation", "--alpha", "1", "--cutoff", "16", "--flip-bs3",
                             "--out", dir.str()});
    CHECK(flipped.code == 1);
    CHECK(flipped.out.find("FAIL") != std::string::npos);
}

TEST_CASE("wigner") {
    TempDir dir("wigner");
    const Run r = qoc({"wigner", "--alpha", "0", "--grid", "-2:2:9", "--format", "csv",
                       "--cutoff", "16", "--out", dir.str()});
    REQUIRE(r.code == 0);
    const WignerGrid g1 = wigner_from_csv(read_text(dir / "wigner_pd1.csv"));
    const WignerGrid g2 = wigner_from_csv(read_text(dir / "wigner_pd2.csv"));
    for (const WignerGrid *g : {&g1, &g2})
        for (int i = 0; i < 9; ++i)
            for (int j = 0; j < 9; ++j)
                CHECK(std::abs(g->values(i, j) -
                               gaussian_wigner_oracle(GaussianKind::coherent, 0.0, g->beta(i, j))) < 1e-6);
    CHECK(qoc({"wigner", "--grid", "1:0:5", "--out", dir.str()}).code == 1);
}

TEST_CASE("sweep") {
    TempDir dir("sweep");
    const std::vector<std::string> args = {"sweep", "--alphas", "1,0.6,0.8", "--cutoff", "16",
                                           "--out", dir.str()};
    REQUIRE(qoc(args).code == 0);
    const std::string first = read_text(dir / "sweep.json");
    const auto j = nlohmann::json::parse(first);
    REQUIRE(j.size() == 3);
    CHECK(j[0]["alpha"] == 0.6);
    CHECK(j[2]["alpha"] == 1.0);
    REQUIRE(qoc(args).code == 0);
    CHECK(read_text(dir / "sweep.json") == first);

    const Run eta = qoc({"sweep", "--alphas", "1", "--etas", "1,0.45", "--cutoff", "16",
                         "--out", dir.str()});
    REQUIRE(eta.code == 0);
    const auto je = nlohmann::json::parse(read_text(dir / "sweep.json"));
    REQUIRE(je.size() == 2);
    CHECK(je[0]["eta"] == 0.45);
    CHECK(je[0]["degradation"].get<double>() < 0.011);

    CHECK(qoc({"sweep", "--alphas", "1:2:0", "--out", dir.str()}).code == 1);
}
