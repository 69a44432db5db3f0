#include "qoptics/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "qoptics/checks.hpp"
#include "qoptics/io.hpp"
#include "qoptics/scheme.hpp"

namespace qoptics {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
    std::optional<double> alpha;
    std::optional<double> nbar;
    std::optional<int> fock;
    std::optional<double> T;
    std::optional<double> s;
    std::optional<double> eta_pd0;
    std::optional<double> eta_pd1;
    std::optional<double> eta_pd2;
    bool onoff = false;
    bool pd0_onoff = false;
    bool flip_bs3 = false;
    std::optional<int> cutoff;
    double leak_budget = 1e-6;
    std::string out;
    std::string format = "json";
    std::optional<long> seed;

    std::string target;
    std::string grid = "-3:3:81";
    std::string alphas;
    std::string Ts = "0.99";
    std::string ss = "0.1";
    std::string etas = "1";

    bool has_scheme_overrides() const {
        return alpha || nbar || fock || T || s || eta_pd0 || eta_pd1 ||
               eta_pd2 || onoff || pd0_onoff || flip_bs3;
    }
};

struct Usage : Error {
    using Error::Error;
};

void add_policy_options(CLI::App *cmd, Options &o) {
    cmd->add_option("--cutoff", o.cutoff, "Fixed Fock cutoff d (never doubled)")
        ->check(CLI::Range(2, 4096));
    cmd->add_option("--leak-budget", o.leak_budget, "Truncation leak budget")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out, "Output directory (default $QOC_OUT_DIR or .)");
    cmd->add_option("--format", o.format, "Artifact format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--seed", o.seed, "Reserved; simulations are deterministic");
}

void add_detector_options(CLI::App *cmd, Options &o) {
    cmd->add_option("--T", o.T, "Transmittivity of BS1 and BS2");
    cmd->add_option("--s", o.s, "Squeezer coupling");
    cmd->add_option("--eta-pd0", o.eta_pd0, "PD0 efficiency");
    cmd->add_option("--eta-pd1", o.eta_pd1, "PD1 efficiency");
    cmd->add_option("--eta-pd2", o.eta_pd2, "PD2 efficiency");
    cmd->add_flag("--onoff", o.onoff, "On-off PD1 and PD2");
    cmd->add_flag("--pd0-onoff", o.pd0_onoff, "On-off PD0");
    cmd->add_flag("--flip-bs3", o.flip_bs3, "Swap the BS3 port convention");
}

void add_input_options(CLI::App *cmd, Options &o) {
    cmd->add_option("--alpha", o.alpha, "Coherent input amplitude (real)");
    cmd->add_option("--nbar", o.nbar, "Thermal input mean photon number");
    cmd->add_option("--fock", o.fock, "Fock input photon number");
}

InputSpec input_from(const Options &o) {
    const int given = (o.alpha ? 1 : 0) + (o.nbar ? 1 : 0) + (o.fock ? 1 : 0);
    if (given > 1)
        throw Usage("--alpha, --nbar and --fock are mutually exclusive");
    if (o.nbar)
        return InputSpec::thermal(*o.nbar);
    if (o.fock)
        return InputSpec::fock(*o.fock);
    return InputSpec::coherent(o.alpha.value_or(1.0));
}

SchemeParams params_from(const Options &o) {
    SchemeParams p;
    p.input = input_from(o);
    p.T = o.T.value_or(p.T);
    p.s = o.s.value_or(p.s);
    p.eta_pd0 = o.eta_pd0.value_or(1.0);
    p.eta_pd1 = o.eta_pd1.value_or(1.0);
    p.eta_pd2 = o.eta_pd2.value_or(1.0);
    p.pd12_onoff = o.onoff;
    p.pd0_onoff = o.pd0_onoff;
    p.flip_bs3 = o.flip_bs3;
    p.cutoff.fixed = o.cutoff;
    p.cutoff.leak_budget = o.leak_budget;
    p.validate();
    return p;
}

fs::path out_dir(const Options &o) {
    fs::path dir = o.out;
    if (dir.empty()) {
        const char *env = std::getenv("QOC_OUT_DIR");
        dir = (env && *env) ? env : ".";
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw Error("output directory '" + dir.string() + "' is not writable");
    return dir;
}

std::string path_in(const fs::path &dir, const std::string &name) {
    return (dir / name).string();
}

/// "a,b,c" or "start:stop:count" (inclusive, evenly spaced).
std::vector<double> parse_list(const std::string &text, const std::string &what) {
    std::vector<double> out;
    auto number = [&](const std::string &s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != s.size() || s.empty() || !std::isfinite(v))
            throw Usage("malformed number '" + s + "' in --" + what);
        return v;
    };
    if (std::count(text.begin(), text.end(), ':') == 2) {
        const auto c1 = text.find(':');
        const auto c2 = text.find(':', c1 + 1);
        const double lo = number(text.substr(0, c1));
        const double hi = number(text.substr(c1 + 1, c2 - c1 - 1));
        const double n = number(text.substr(c2 + 1));
        if (n != std::floor(n) || n < 0)
            throw Usage("point count in --" + what + " must be a whole number");
        const int count = static_cast<int>(n);
        for (int k = 0; k < count; ++k)
            out.push_back(count == 1 ? lo : lo + (hi - lo) * k / (count - 1));
    } else if (!text.empty()) {
        std::string item;
        std::istringstream in(text);
        while (std::getline(in, item, ','))
            out.push_back(number(item));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.empty())
        throw Usage("empty range for --" + what);
    return out;
}

Axis parse_axis(const std::string &text) {
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string::npos ? c1 : text.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw Usage("--grid must be <min>:<max>:<count>");
    try {
        return Axis(std::stod(text.substr(0, c1)),
                    std::stod(text.substr(c1 + 1, c2 - c1 - 1)),
                    std::stoi(text.substr(c2 + 1)));
    } catch (const std::logic_error &) {
        throw Usage("--grid must be <min>:<max>:<count>");
    }
}

std::string input_label(const InputSpec &in) {
    switch (in.kind) {
    case InputSpec::Kind::coherent: return "coherent";
    case InputSpec::Kind::thermal: return "thermal";
    case InputSpec::Kind::fock: return "fock";
    case InputSpec::Kind::vacuum: return "vacuum";
    }
    return "";
}

void write_table(const Table &t, const fs::path &dir, const std::string &stem,
                 const std::string &format) {
    if (format == "csv")
        write_text(path_in(dir, stem + ".csv"), t.to_csv());
    else
        write_text(path_in(dir, stem + ".json"), t.to_json().dump(2) + "\n");
}

// ---------------------------------------------------------------------------

int cmd_run_fig1(const Options &o, std::ostream &out) {
    const SchemeParams p = params_from(o);
    const SchemeResult r = run_interferometer(p);
    Table t;
    t.columns = {"input", "alpha", "nbar", "fock", "T", "s", "eta_pd0",
                 "eta_pd1", "eta_pd2", "pd0_onoff", "pd12_onoff", "flip_bs3",
                 "cutoff", "leak", "p_pd0", "p_b", "p_c", "p_bc", "p_bc_given_b",
                 "p_bc_given_c", "pd1_weight", "pd1_f_input", "pd1_f_attenuated",
                 "pd2_weight", "pd2_f_input", "pd2_f_attenuated"};
    t.add({input_label(p.input), p.input.alpha.real(), p.input.nbar, p.input.n,
           p.T, p.s, p.eta_pd0, p.eta_pd1, p.eta_pd2, p.pd0_onoff, p.pd12_onoff,
           p.flip_bs3, r.cutoff, r.leak, r.p_pd0, r.p_b, r.p_c, r.p_bc,
           r.p_bc_given_b, r.p_bc_given_c, r.pd1.weight, r.pd1.fidelity_to_input,
           r.pd1.fidelity_to_attenuated, r.pd2.weight, r.pd2.fidelity_to_input,
           r.pd2.fidelity_to_attenuated});
    const fs::path dir = out_dir(o);
    write_table(t, dir, "report", o.format);

    out << std::setprecision(8);
    out << "cutoff " << r.cutoff << ", leak " << r.leak << "\n"
        << "P(PD0) " << r.p_pd0 << "\n"
        << "P_bc|b " << r.p_bc_given_b << ", P_bc|c " << r.p_bc_given_c << "\n"
        << "pd1 weight " << r.pd1.weight << ", F(input) "
        << r.pd1.fidelity_to_input << "\n"
        << "pd2 weight " << r.pd2.weight << ", F(input) "
        << r.pd2.fidelity_to_input << ", F(attenuated) "
        << r.pd2.fidelity_to_attenuated << "\n";
    return 0;
}

int cmd_run_file(const Options &o, std::ostream &out, std::ostream &err) {
    if (o.has_scheme_overrides())
        throw Usage("parameter overrides apply to the fig1 scenario only; edit "
                    "the circuit file instead");
    if (!fs::exists(o.target)) {
        err << "error: file not found: " << o.target << "\n";
        return 1;
    }
    const ParseResult parsed = parse_circuit(read_text(o.target));
    if (!parsed.ok()) {
        for (const auto &e : parsed.errors)
            err << o.target << ":" << e.line << ":" << e.column << ": "
                << e.message << " [" << to_string(e.code) << "]\n";
        return 1;
    }
    CutoffPolicy policy{o.cutoff, o.leak_budget};
    const ExecutionResult r = run_circuit(*parsed.spec, policy);
    const fs::path dir = out_dir(o);

    json report = {{"circuit", o.target},
                   {"cutoff", r.cutoff},
                   {"max_leak", r.max_leak},
                   {"herald_weight", r.herald_weight}};
    json heralds = json::array();
    for (const auto &h : r.heralds)
        heralds.push_back({{"mode", h.mode}, {"probability", h.probability}});
    report["heralds"] = heralds;
    Table flat;
    flat.columns = {"quantity", "mode", "value"};
    flat.add({"cutoff", "", r.cutoff});
    flat.add({"max_leak", "", r.max_leak});
    flat.add({"herald_weight", "", r.herald_weight});
    for (const auto &h : r.heralds)
        flat.add({"herald_probability", h.mode, h.probability});

    json outputs = json::array();
    out << std::setprecision(8) << "cutoff " << r.cutoff << ", herald weight "
        << r.herald_weight << "\n";
    for (const auto &res : r.outputs) {
        const OutputRequest &req = res.request;
        switch (req.kind) {
        case OutputRequest::Kind::fidelity: {
            const double f = std::get<double>(res.value);
            outputs.push_back({{"kind", "fidelity"}, {"mode", req.mode}, {"value", f}});
            flat.add({"fidelity", req.mode, f});
            out << "fidelity " << req.mode << " " << f << "\n";
            break;
        }
        case OutputRequest::Kind::probs: {
            const auto &p = std::get<ProbabilityReport>(res.value);
            json j = probabilities_to_json(p);
            j["kind"] = "probs";
            outputs.push_back(j);
            for (const auto &[mode, c] : p.click)
                flat.add({"click", mode, c});
            for (const auto &pair : p.click_pairs)
                flat.add({"click_pair", pair.first + "|" + pair.second,
                          pair.probability});
            break;
        }
        case OutputRequest::Kind::wigner: {
            const auto &g = std::get<WignerGrid>(res.value);
            const std::string file = "wigner_" + req.mode + "." + o.format;
            write_text(path_in(dir, file), o.format == "csv"
                                               ? wigner_to_csv(g)
                                               : wigner_to_json(g).dump() + "\n");
            const auto m = min_wigner(g);
            outputs.push_back({{"kind", "wigner"}, {"mode", req.mode},
                               {"file", file}, {"min", m.value}});
            flat.add({"wigner_min", req.mode, m.value});
            out << "wigner " << req.mode << " min " << m.value << " -> " << file
                << "\n";
            break;
        }
        case OutputRequest::Kind::state: {
            const auto &s = std::get<FinalState>(res.value);
            write_text(path_in(dir, "state.json"), state_to_json(s).dump() + "\n");
            outputs.push_back({{"kind", "state"}, {"file", "state.json"}});
            break;
        }
        }
    }
    report["outputs"] = outputs;
    if (o.format == "csv")
        write_text(path_in(dir, "report.csv"), flat.to_csv());
    else
        write_text(path_in(dir, "report.json"), report.dump(2) + "\n");
    return 0;
}

struct Check {
    std::string name;
    double value;
    double tolerance;
    bool pass;
};

int cmd_verify(const Options &o, std::ostream &out) {
    if (o.nbar || o.fock)
        throw Usage("verify-commutation sweeps coherent inputs only");
    SchemeParams p = params_from(o);
    const std::vector<double> alphas =
        o.alpha ? std::vector<double>{*o.alpha}
                : parse_list(o.alphas.empty() ? "0,0.6,1,1.4" : o.alphas, "alphas");
    const auto rows = commutation_report(p, alphas);
    const double r2 = 1.0 - p.T;
    const double lam = std::tanh(p.s);
    const double identity_floor = 1.0 - 10.0 * (r2 + lam * lam);

    Table t;
    t.columns = {"alpha", "f_input", "f_attenuated", "f_predicted", "f_oracle",
                 "p_bc_given_b", "p_bc_given_c", "pd1_wigner_min", "weight_ratio",
                 "expected_ratio", "identity_ok", "attenuation_ok", "ratio_ok",
                 "pass"};
    bool all = true;
    out << std::fixed << std::setprecision(6);
    out << "alpha   F(input)  F(t*alpha) F(oracle) P_bc|b    P_bc|c    "
           "W1_min     ratio/expected  result\n";
    for (const auto &row : rows) {
        const bool identity = row.f_oracle >= identity_floor;
        const bool attenuation = row.f_attenuated >= row.f_input - 1e-12;
        const bool ratio = std::abs(row.weight_ratio / row.expected_ratio - 1.0) <= 0.1;
        const bool pass = identity && attenuation && ratio;
        all = all && pass;
        t.add({row.alpha, row.f_input, row.f_attenuated, row.f_predicted,
               row.f_oracle, row.p_bc_given_b, row.p_bc_given_c,
               row.pd1_wigner_min, row.weight_ratio, row.expected_ratio, identity,
               attenuation, ratio, pass});
        out << std::setw(6) << row.alpha << "  " << row.f_input << "  "
            << row.f_attenuated << "  " << row.f_oracle << "  "
            << row.p_bc_given_b << "  " << row.p_bc_given_c << "  "
            << std::setw(9) << row.pd1_wigner_min << "  " << std::setw(6)
            << row.weight_ratio / row.expected_ratio << "          "
            << (pass ? "PASS" : "FAIL") << "\n";
    }

    double comm = 0.0;
    for (int d = 2; d <= 64; ++d)
        comm = std::max(comm, commutator_defect(d));
    const int d = 30;
    std::vector<Check> checks = {
        {"truncated_commutator", comm, 1e-9, comm <= 1e-9},
        {"beam_splitter_conjugation",
         beam_splitter_conjugation_defect(p.T, d), 1e-9, false},
        {"beam_splitter_conjugation_50_50",
         beam_splitter_conjugation_defect(0.5, d), 1e-9, false},
        {"squeezer_conjugation", squeezer_conjugation_defect(p.s, d), 1e-9, false},
        {"hom_bunching", hom_defect(), 1e-10, false},
    };
    Table ops;
    ops.columns = {"check", "defect", "tolerance", "pass"};
    out << std::scientific << std::setprecision(3);
    for (auto &c : checks) {
        c.pass = c.value <= c.tolerance;
        all = all && c.pass;
        ops.add({c.name, c.value, c.tolerance, c.pass});
        out << std::left << std::setw(34) << c.name << std::right << c.value
            << "  " << (c.pass ? "PASS" : "FAIL") << "\n";
    }
    out << (all ? "all checks passed\n" : "verification FAILED\n");

    const fs::path dir = out_dir(o);
    if (o.format == "csv") {
        write_text(path_in(dir, "verify.csv"), t.to_csv());
        write_text(path_in(dir, "verify_operators.csv"), ops.to_csv());
    } else {
        const json j = {{"rows", t.to_json()},
                        {"operator_checks", ops.to_json()},
                        {"pass", all}};
        write_text(path_in(dir, "verify.json"), j.dump(2) + "\n");
    }
    return all ? 0 : 1;
}

int cmd_wigner(const Options &o, std::ostream &out) {
    const SchemeParams p = params_from(o);
    const Axis axis = parse_axis(o.grid);
    const fs::path dir = out_dir(o);
    out << std::setprecision(8);
    for (Branch b : {Branch::pd1, Branch::pd2}) {
        const WignerGrid g = branch_wigner(p, b, axis, axis);
        const std::string file =
            "wigner_" + std::string(to_string(b)) + "." + o.format;
        write_text(path_in(dir, file), o.format == "csv"
                                           ? wigner_to_csv(g)
                                           : wigner_to_json(g).dump() + "\n");
        const auto m = min_wigner(g);
        out << to_string(b) << " min W " << m.value << " at (" << m.beta.real()
            << ", " << m.beta.imag() << ") -> " << file << "\n";
    }
    return 0;
}

struct SweepPoint {
    double alpha, T, s, eta;
};

int cmd_sweep(const Options &o, std::ostream &out) {
    if (o.nbar || o.fock || o.alpha || o.T || o.s)
        throw Usage("sweep takes --alphas, --Ts, --ss and --etas lists");
    const auto alphas = parse_list(o.alphas.empty() ? "1" : o.alphas, "alphas");
    const auto Ts = parse_list(o.Ts, "Ts");
    const auto ss = parse_list(o.ss, "ss");
    const auto etas = parse_list(o.etas, "etas");
    std::vector<SweepPoint> points;
    for (double a : alphas)
        for (double T : Ts)
            for (double s : ss)
                for (double eta : etas)
                    points.push_back({a, T, s, eta});
    const SchemeParams base = params_from(o);
    for (const auto &pt : points) {
        SchemeParams p = base;
        p.T = pt.T;
        p.s = pt.s;
        p.validate();
        if (!(pt.eta > 0.0 && pt.eta <= 1.0))
            throw Usage("efficiencies must lie in (0, 1]");
    }

    std::vector<std::vector<json>> rows(points.size());
    std::vector<std::exception_ptr> failures(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            try {
                const SweepPoint &pt = points[i];
                SchemeParams p = base;
                p.input = InputSpec::coherent(pt.alpha);
                p.T = pt.T;
                p.s = pt.s;
                const SchemeResult r = run_interferometer(p);
                const Degradation g = efficiency_degradation(p, pt.eta);
                rows[i] = {pt.alpha, pt.T, pt.s, pt.eta, r.cutoff,
                           r.pd2.fidelity_to_input, r.pd2.fidelity_to_attenuated,
                           r.p_bc_given_b, r.p_bc_given_c, r.pd1.weight,
                           r.pd2.weight, g.f_degraded, g.relative};
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const std::size_t n_threads = std::max<std::size_t>(
        1, std::min<std::size_t>(points.size(), std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < n_threads; ++k)
        pool.emplace_back(worker);
    for (auto &th : pool)
        th.join();
    for (const auto &f : failures)
        if (f)
            std::rethrow_exception(f);

    Table t;
    t.columns = {"alpha", "T", "s", "eta", "cutoff", "f_input", "f_attenuated",
                 "p_bc_given_b", "p_bc_given_c", "pd1_weight", "pd2_weight",
                 "f_onoff", "degradation"};
    for (auto &row : rows)
        t.add(std::move(row));
    write_table(t, out_dir(o), "sweep", o.format);
    out << points.size() << " points written\n";
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err) {
    CLI::App app{"Fock-space simulator of the single-photon commutator "
                 "interferometer",
                 "qoc"};
    app.require_subcommand(1);
    Options o;

    auto *run = app.add_subcommand("run", "Run the fig1 scenario or a .qoc circuit");
    run->add_option("target", o.target, "'fig1' or a circuit file")->required();
    add_input_options(run, o);
    add_detector_options(run, o);
    add_policy_options(run, o);

    auto *verify = app.add_subcommand("verify-commutation",
                                      "Check the commutator identity over an alpha sweep");
    add_input_options(verify, o);
    verify->add_option("--alphas", o.alphas, "Alpha list a,b,c or start:stop:count");
    add_detector_options(verify, o);
    add_policy_options(verify, o);

    auto *wig = app.add_subcommand("wigner", "Wigner grids of both branches");
    add_input_options(wig, o);
    add_detector_options(wig, o);
    add_policy_options(wig, o);
    wig->add_option("--grid", o.grid, "Axis <min>:<max>:<count> for Re and Im");

    auto *sweep = app.add_subcommand("sweep", "Cartesian sweep of the fig1 scenario");
    add_input_options(sweep, o);
    add_detector_options(sweep, o);
    add_policy_options(sweep, o);
    sweep->add_option("--alphas", o.alphas, "Alpha list");
    sweep->add_option("--Ts", o.Ts, "Transmittivity list");
    sweep->add_option("--ss", o.ss, "Squeezer coupling list");
    sweep->add_option("--etas", o.etas, "PD1/PD2 on-off efficiency list");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run)
            return o.target == "fig1" ? cmd_run_fig1(o, out)
                                      : cmd_run_file(o, out, err);
        if (*verify)
            return cmd_verify(o, out);
        if (*wig)
            return cmd_wigner(o, out);
        return cmd_sweep(o, out);
    } catch (const LeakBudgetError &e) {
        err << "error: " << e.what() << "\n"
            << "leak " << e.leak() << " > budget " << e.budget() << " at cutoff "
            << e.cutoff() << "; suggest --cutoff " << 2 * e.cutoff() << "\n";
        return 2;
    } catch (const ZeroProbabilityError &e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace qoptics
