#include "qoptics/circuit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <regex>
#include <set>
#include <sstream>

namespace qoptics {

namespace {

struct Token {
    std::string text;
    int column; // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (c == '#')
            break;
        if (c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f') {
            ++i;
            continue;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
               line[i] != '\r' && line[i] != '#' && line[i] != '\v' &&
               line[i] != '\f')
            ++i;
        out.push_back({std::string(line.substr(start, i - start)),
                       static_cast<int>(start) + 1});
    }
    return out;
}

bool is_identifier(const std::string &s) {
    static const std::regex re("[A-Za-z_][A-Za-z0-9_]*");
    return std::regex_match(s, re);
}

std::optional<double> parse_float(const std::string &s) {
    static const std::regex re(R"([+-]?([0-9]+\.?[0-9]*|\.[0-9]+)([eE][+-]?[0-9]+)?)");
    if (!std::regex_match(s, re))
        return std::nullopt;
    const char *first = s.data();
    if (*first == '+')
        ++first;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

std::optional<int> parse_count(const std::string &s) {
    static const std::regex re("[0-9]+");
    if (!std::regex_match(s, re) || s.size() > 9)
        return std::nullopt;
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

/// Source position of one spec item and of its mode arguments.
struct ItemPos {
    int line = 0;
    int column = 0;
    std::vector<int> mode_columns;
};

struct Positions {
    ItemPos modes;
    std::vector<ItemPos> inputs;
    std::vector<ItemPos> statements;
    std::vector<ItemPos> outputs;
};

class Checker {
  public:
    Checker(const CircuitSpec &spec, const Positions *pos)
        : spec_(spec), pos_(pos) {}

    std::vector<ParseError> run() {
        if (spec_.modes.empty()) {
            add(pos_ ? pos_->modes.line : 0, 0, ParseErrorCode::no_modes,
                "no modes declared");
            return std::move(errors_);
        }
        check_mode_list();
        check_inputs();
        check_statements();
        check_outputs();
        std::stable_sort(errors_.begin(), errors_.end(),
                         [](const ParseError &a, const ParseError &b) {
                             return a.line < b.line;
                         });
        return std::move(errors_);
    }

  private:
    void add(int line, int column, ParseErrorCode code, std::string msg) {
        errors_.push_back({line, column, code, std::move(msg)});
    }

    static const ItemPos &at(const std::vector<ItemPos> *v, std::size_t i) {
        static const ItemPos none;
        return (v && i < v->size()) ? (*v)[i] : none;
    }
    static int mode_col(const ItemPos &p, std::size_t k) {
        return k < p.mode_columns.size() ? p.mode_columns[k] : p.column;
    }

    bool declared(const std::string &m) const {
        return std::find(spec_.modes.begin(), spec_.modes.end(), m) !=
               spec_.modes.end();
    }

    void check_mode_list() {
        std::set<std::string> seen;
        const ItemPos &p = pos_ ? pos_->modes : at(nullptr, 0);
        for (std::size_t k = 0; k < spec_.modes.size(); ++k) {
            const auto &m = spec_.modes[k];
            if (!is_identifier(m))
                add(p.line, mode_col(p, k), ParseErrorCode::invalid_value,
                    "invalid mode label '" + m + "'");
            else if (!seen.insert(m).second)
                add(p.line, mode_col(p, k), ParseErrorCode::duplicate_modes,
                    "mode '" + m + "' declared twice");
        }
    }

    void check_inputs() {
        std::set<std::string> have;
        const auto *pv = pos_ ? &pos_->inputs : nullptr;
        for (std::size_t i = 0; i < spec_.inputs.size(); ++i) {
            const auto &in = spec_.inputs[i];
            const ItemPos &p = at(pv, i);
            if (!declared(in.mode)) {
                add(p.line, mode_col(p, 0), ParseErrorCode::undeclared_mode,
                    "undeclared mode '" + in.mode + "'");
                continue;
            }
            if (!have.insert(in.mode).second)
                add(p.line, mode_col(p, 0), ParseErrorCode::duplicate_input,
                    "mode '" + in.mode + "' already has an input");
            if (in.input.kind == InputSpec::Kind::thermal &&
                !(in.input.nbar >= 0.0 && std::isfinite(in.input.nbar)))
                add(p.line, p.column, ParseErrorCode::invalid_value,
                    "thermal mean photon number must be non-negative");
            if (in.input.kind == InputSpec::Kind::fock && in.input.n < 0)
                add(p.line, p.column, ParseErrorCode::invalid_value,
                    "Fock level must be non-negative");
            if (in.input.kind == InputSpec::Kind::coherent &&
                !(std::isfinite(in.input.alpha.real()) &&
                  std::isfinite(in.input.alpha.imag())))
                add(p.line, p.column, ParseErrorCode::invalid_value,
                    "coherent amplitude must be finite");
        }
        const int line = pos_ ? pos_->modes.line : 0;
        for (const auto &m : spec_.modes)
            if (!have.count(m))
                add(line, 0, ParseErrorCode::missing_input,
                    "mode '" + m + "' has no input statement");
    }

    bool check_mode_use(const std::string &m, const ItemPos &p, std::size_t k) {
        if (!declared(m)) {
            add(p.line, mode_col(p, k), ParseErrorCode::undeclared_mode,
                "undeclared mode '" + m + "'");
            return false;
        }
        if (measured_.count(m)) {
            add(p.line, mode_col(p, k), ParseErrorCode::mode_already_measured,
                "mode '" + m + "' was already measured and traced out");
            return false;
        }
        return true;
    }

    void check_statements() {
        const auto *pv = pos_ ? &pos_->statements : nullptr;
        for (std::size_t i = 0; i < spec_.statements.size(); ++i) {
            const ItemPos &p = at(pv, i);
            std::visit([&](const auto &st) { check(st, p); },
                       spec_.statements[i]);
        }
    }

    void check_pair(const std::string &m1, const std::string &m2,
                    const ItemPos &p) {
        const bool ok1 = check_mode_use(m1, p, 0);
        const bool ok2 = check_mode_use(m2, p, 1);
        if (ok1 && ok2 && m1 == m2)
            add(p.line, mode_col(p, 1), ParseErrorCode::modes_must_differ,
                "modes must differ");
    }

    void check(const BeamSplitterStatement &st, const ItemPos &p) {
        check_pair(st.transmitted, st.reflected, p);
        if (!(st.T > 0.0 && st.T <= 1.0))
            add(p.line, p.column, ParseErrorCode::invalid_value,
                "transmittivity T must lie in (0, 1]");
    }

    void check(const SqueezerStatement &st, const ItemPos &p) {
        check_pair(st.signal, st.idler, p);
        if (!(st.s >= 0.0 && std::isfinite(st.s)))
            add(p.line, p.column, ParseErrorCode::invalid_value,
                "squeezer coupling s must be non-negative");
    }

    void check(const HeraldStatement &st, const ItemPos &p) {
        if (declared(st.mode) && measured_.count(st.mode)) {
            add(p.line, mode_col(p, 0), ParseErrorCode::duplicate_herald,
                "mode '" + st.mode + "' is heralded twice");
        } else if (check_mode_use(st.mode, p, 0)) {
            measured_.insert(st.mode);
        }
        if (!(st.detector.efficiency >= 0.0 && st.detector.efficiency <= 1.0))
            add(p.line, p.column, ParseErrorCode::invalid_value,
                "detector efficiency must lie in [0, 1]");
        if (st.requirement.kind == Requirement::Kind::exactly) {
            if (st.detector.kind == DetectorKind::on_off)
                add(p.line, p.column, ParseErrorCode::onoff_exact,
                    "an on-off detector cannot herald an exact photon number");
            if (st.requirement.count < 0)
                add(p.line, p.column, ParseErrorCode::invalid_value,
                    "photon number must be non-negative");
        }
        if (st.requirement.kind == Requirement::Kind::unmeasured)
            add(p.line, p.column, ParseErrorCode::invalid_value,
                "a herald must measure its mode");
    }

    void check_outputs() {
        const auto *pv = pos_ ? &pos_->outputs : nullptr;
        for (std::size_t i = 0; i < spec_.outputs.size(); ++i) {
            const auto &out = spec_.outputs[i];
            const ItemPos &p = at(pv, i);
            if (out.kind == OutputRequest::Kind::wigner ||
                out.kind == OutputRequest::Kind::fidelity)
                check_mode_use(out.mode, p, 0);
            if (out.kind == OutputRequest::Kind::wigner &&
                (out.axis.count < 2 || !(out.axis.max > out.axis.min)))
                add(p.line, p.column, ParseErrorCode::invalid_value,
                    "wigner grid needs min < max and at least 2 points");
        }
        if (spec_.outputs.empty())
            add(pos_ ? last_line_ : 0, 0, ParseErrorCode::no_outputs,
                "no output requested");
    }

  public:
    int last_line_ = 0;

  private:
    const CircuitSpec &spec_;
    const Positions *pos_;
    std::set<std::string> measured_;
    std::vector<ParseError> errors_;
};

class Parser {
  public:
    ParseResult run(std::string_view text) {
        int line_no = 0;
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t end = text.find('\n', start);
            if (end == std::string_view::npos)
                end = text.size();
            ++line_no;
            line(line_no, tokenize(text.substr(start, end - start)));
            if (end == text.size())
                break;
            start = end + 1;
        }
        if (!saw_modes_)
            pos_.modes.line = 1;

        Checker checker(spec_, &pos_);
        checker.last_line_ = line_no;
        auto semantic = checker.run();
        errors_.insert(errors_.end(), semantic.begin(), semantic.end());
        std::stable_sort(errors_.begin(), errors_.end(),
                         [](const ParseError &a, const ParseError &b) {
                             return a.line < b.line;
                         });
        ParseResult r;
        r.errors = std::move(errors_);
        if (r.errors.empty())
            r.spec = std::move(spec_);
        return r;
    }

  private:
    void error(int line, int column, ParseErrorCode code, std::string msg) {
        errors_.push_back({line, column, code, std::move(msg)});
    }

    bool arity(int ln, const std::vector<Token> &t, std::size_t min,
               std::size_t max) {
        if (t.size() < min) {
            const int col = t.back().column + static_cast<int>(t.back().text.size());
            error(ln, col, ParseErrorCode::missing_argument,
                  "'" + t[0].text + "' expects more arguments");
            return false;
        }
        if (t.size() > max) {
            error(ln, t[max].column, ParseErrorCode::unexpected_token,
                  "unexpected token '" + t[max].text + "'");
            return false;
        }
        return true;
    }

    std::optional<double> number(int ln, const Token &tok) {
        auto v = parse_float(tok.text);
        if (!v)
            error(ln, tok.column, ParseErrorCode::malformed_number,
                  "malformed number '" + tok.text + "'");
        return v;
    }

    /// `key=<float>`
    std::optional<double> keyed(int ln, const Token &tok, const std::string &key) {
        const std::string prefix = key + "=";
        if (tok.text.rfind(prefix, 0) != 0) {
            error(ln, tok.column, ParseErrorCode::missing_argument,
                  "expected '" + prefix + "<float>', got '" + tok.text + "'");
            return std::nullopt;
        }
        Token value{tok.text.substr(prefix.size()),
                    tok.column + static_cast<int>(prefix.size())};
        return number(ln, value);
    }

    ItemPos item(int ln, const std::vector<Token> &t,
                 std::initializer_list<std::size_t> mode_tokens) {
        ItemPos p{ln, t[0].column, {}};
        for (std::size_t k : mode_tokens)
            p.mode_columns.push_back(k < t.size() ? t[k].column : t[0].column);
        return p;
    }

    void line(int ln, const std::vector<Token> &t) {
        if (t.empty())
            return;
        const std::string &kw = t[0].text;
        if (kw != "modes" && kw != "input" && kw != "bs" && kw != "tmsq" &&
            kw != "herald" && kw != "out") {
            error(ln, t[0].column, ParseErrorCode::unknown_keyword,
                  "unknown keyword '" + kw + "'");
            return;
        }
        if (kw == "modes") {
            modes(ln, t);
            return;
        }
        if (!saw_modes_) {
            error(ln, t[0].column, ParseErrorCode::statement_before_modes,
                  "'" + kw + "' before the modes declaration");
            return;
        }
        if (kw == "input")
            input(ln, t);
        else if (kw == "bs")
            beam_splitter(ln, t);
        else if (kw == "tmsq")
            squeezer(ln, t);
        else if (kw == "herald")
            herald(ln, t);
        else
            output(ln, t);
    }

    void modes(int ln, const std::vector<Token> &t) {
        if (saw_modes_) {
            error(ln, t[0].column, ParseErrorCode::duplicate_modes,
                  "modes declared more than once");
            return;
        }
        if (t.size() < 2) {
            error(ln, t[0].column + 5, ParseErrorCode::missing_argument,
                  "'modes' expects at least one label");
            return;
        }
        saw_modes_ = true;
        pos_.modes = {ln, t[0].column, {}};
        for (std::size_t k = 1; k < t.size(); ++k) {
            spec_.modes.push_back(t[k].text);
            pos_.modes.mode_columns.push_back(t[k].column);
        }
    }

    void input(int ln, const std::vector<Token> &t) {
        if (!arity(ln, t, 3, 5))
            return;
        const std::string &kind = t[2].text;
        InputSpec in;
        if (kind == "vacuum") {
            if (!arity(ln, t, 3, 3))
                return;
        } else if (kind == "coherent") {
            if (!arity(ln, t, 5, 5))
                return;
            auto re = number(ln, t[3]);
            auto im = number(ln, t[4]);
            if (!re || !im)
                return;
            in = InputSpec::coherent({*re, *im});
        } else if (kind == "thermal") {
            if (!arity(ln, t, 4, 4))
                return;
            auto nbar = number(ln, t[3]);
            if (!nbar)
                return;
            in = InputSpec::thermal(*nbar);
        } else if (kind == "fock") {
            if (!arity(ln, t, 4, 4))
                return;
            auto n = parse_count(t[3].text);
            if (!n) {
                error(ln, t[3].column, ParseErrorCode::malformed_number,
                      "malformed photon number '" + t[3].text + "'");
                return;
            }
            in = InputSpec::fock(*n);
        } else {
            error(ln, t[2].column, ParseErrorCode::unknown_keyword,
                  "unknown input kind '" + kind + "'");
            return;
        }
        spec_.inputs.push_back({t[1].text, in});
        pos_.inputs.push_back(item(ln, t, {1}));
    }

    void beam_splitter(int ln, const std::vector<Token> &t) {
        if (!arity(ln, t, 4, 4))
            return;
        auto T = keyed(ln, t[3], "T");
        if (!T)
            return;
        spec_.statements.emplace_back(
            BeamSplitterStatement{t[1].text, t[2].text, *T});
        pos_.statements.push_back(item(ln, t, {1, 2}));
    }

    void squeezer(int ln, const std::vector<Token> &t) {
        if (!arity(ln, t, 4, 4))
            return;
        auto s = keyed(ln, t[3], "s");
        if (!s)
            return;
        spec_.statements.emplace_back(SqueezerStatement{t[1].text, t[2].text, *s});
        pos_.statements.push_back(item(ln, t, {1, 2}));
    }

    void herald(int ln, const std::vector<Token> &t) {
        if (!arity(ln, t, 3, 6))
            return;
        HeraldStatement h;
        h.mode = t[1].text;
        std::size_t k = 3;
        const std::string &what = t[2].text;
        if (what == "click") {
            h.requirement = Requirement::click();
        } else if (what == "noclick") {
            h.requirement = Requirement::no_click();
        } else if (what == "exactly") {
            if (t.size() < 4) {
                error(ln, t[2].column + 7, ParseErrorCode::missing_argument,
                      "'exactly' expects a photon number");
                return;
            }
            auto n = parse_count(t[3].text);
            if (!n) {
                error(ln, t[3].column, ParseErrorCode::malformed_number,
                      "malformed photon number '" + t[3].text + "'");
                return;
            }
            h.requirement = Requirement::exactly(*n);
            k = 4;
        } else {
            error(ln, t[2].column, ParseErrorCode::unknown_keyword,
                  "unknown herald outcome '" + what + "'");
            return;
        }
        bool have_eta = false, have_onoff = false;
        for (; k < t.size(); ++k) {
            if (t[k].text == "onoff" && !have_onoff) {
                h.detector.kind = DetectorKind::on_off;
                have_onoff = true;
            } else if (t[k].text.rfind("eta=", 0) == 0 && !have_eta) {
                auto eta = keyed(ln, t[k], "eta");
                if (!eta)
                    return;
                h.detector.efficiency = *eta;
                have_eta = true;
            } else {
                error(ln, t[k].column, ParseErrorCode::unexpected_token,
                      "unexpected token '" + t[k].text + "'");
                return;
            }
        }
        spec_.statements.emplace_back(std::move(h));
        pos_.statements.push_back(item(ln, t, {1}));
    }

    void output(int ln, const std::vector<Token> &t) {
        if (!arity(ln, t, 2, 4))
            return;
        const std::string &what = t[1].text;
        OutputRequest out;
        if (what == "probs" || what == "state") {
            if (!arity(ln, t, 2, 2))
                return;
            out.kind = what == "probs" ? OutputRequest::Kind::probs
                                       : OutputRequest::Kind::state;
        } else if (what == "fidelity") {
            if (!arity(ln, t, 4, 4))
                return;
            if (t[3].text != "input") {
                error(ln, t[3].column, ParseErrorCode::unknown_keyword,
                      "fidelity reference must be 'input'");
                return;
            }
            out.kind = OutputRequest::Kind::fidelity;
            out.mode = t[2].text;
        } else if (what == "wigner") {
            if (!arity(ln, t, 4, 4))
                return;
            auto axis = grid_axis(ln, t[3]);
            if (!axis)
                return;
            out.kind = OutputRequest::Kind::wigner;
            out.mode = t[2].text;
            out.axis = *axis;
        } else {
            error(ln, t[1].column, ParseErrorCode::unknown_keyword,
                  "unknown output '" + what + "'");
            return;
        }
        spec_.outputs.push_back(out);
        pos_.outputs.push_back(item(ln, t, {2}));
    }

    /// <min>:<max>:<count>
    std::optional<Axis> grid_axis(int ln, const Token &tok) {
        const auto first = tok.text.find(':');
        const auto second = first == std::string::npos
                                ? std::string::npos
                                : tok.text.find(':', first + 1);
        if (second == std::string::npos) {
            error(ln, tok.column, ParseErrorCode::malformed_number,
                  "grid must be <min>:<max>:<count>, got '" + tok.text + "'");
            return std::nullopt;
        }
        Token lo{tok.text.substr(0, first), tok.column};
        Token hi{tok.text.substr(first + 1, second - first - 1),
                 tok.column + static_cast<int>(first) + 1};
        Token cnt{tok.text.substr(second + 1),
                  tok.column + static_cast<int>(second) + 1};
        auto min = number(ln, lo);
        auto max = number(ln, hi);
        auto count = parse_count(cnt.text);
        if (!count)
            error(ln, cnt.column, ParseErrorCode::malformed_number,
                  "malformed grid point count '" + cnt.text + "'");
        if (!min || !max || !count)
            return std::nullopt;
        if (*count < 2 || !(*max > *min)) {
            error(ln, tok.column, ParseErrorCode::invalid_value,
                  "wigner grid needs min < max and at least 2 points");
            return std::nullopt;
        }
        return Axis(*min, *max, *count);
    }

    CircuitSpec spec_;
    Positions pos_;
    std::vector<ParseError> errors_;
    bool saw_modes_ = false;
};

} // namespace

std::string_view to_string(ParseErrorCode code) {
    switch (code) {
    case ParseErrorCode::no_modes: return "no_modes";
    case ParseErrorCode::duplicate_modes: return "duplicate_modes";
    case ParseErrorCode::statement_before_modes: return "statement_before_modes";
    case ParseErrorCode::unknown_keyword: return "unknown_keyword";
    case ParseErrorCode::undeclared_mode: return "undeclared_mode";
    case ParseErrorCode::duplicate_input: return "duplicate_input";
    case ParseErrorCode::missing_input: return "missing_input";
    case ParseErrorCode::malformed_number: return "malformed_number";
    case ParseErrorCode::invalid_value: return "invalid_value";
    case ParseErrorCode::missing_argument: return "missing_argument";
    case ParseErrorCode::unexpected_token: return "unexpected_token";
    case ParseErrorCode::modes_must_differ: return "modes_must_differ";
    case ParseErrorCode::duplicate_herald: return "duplicate_herald";
    case ParseErrorCode::mode_already_measured: return "mode_already_measured";
    case ParseErrorCode::onoff_exact: return "onoff_exact";
    case ParseErrorCode::no_outputs: return "no_outputs";
    }
    return "unknown";
}

std::string ParseError::format() const {
    std::ostringstream os;
    os << "line " << line;
    if (column > 0)
        os << ", column " << column;
    os << ": " << message << " [" << to_string(code) << "]";
    return os.str();
}

const InputSpec &CircuitSpec::input_of(const std::string &mode) const {
    for (const auto &in : inputs)
        if (in.mode == mode)
            return in.input;
    throw UnknownModeError("mode '" + mode + "' has no input");
}

int InputSpec::suggested_cutoff() const {
    switch (kind) {
    case Kind::vacuum:
        return 2;
    case Kind::coherent:
        return static_cast<int>(std::ceil(4.0 * (std::norm(alpha) + 1.0)));
    case Kind::thermal:
        return static_cast<int>(std::ceil(8.0 * (nbar + 1.0)));
    case Kind::fock:
        return 4 * (n + 1);
    }
    return 2;
}

ParseResult parse_circuit(std::string_view text) {
    try {
        return Parser().run(text);
    } catch (const std::exception &e) {
        // Any escape here is a parser bug; report it instead of crashing.
        ParseResult r;
        r.errors.push_back({0, 0, ParseErrorCode::invalid_value,
                            std::string("internal parser error: ") + e.what()});
        return r;
    }
}

std::vector<ParseError> validate(const CircuitSpec &spec) {
    return Checker(spec, nullptr).run();
}

} // namespace qoptics
