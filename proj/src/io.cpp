#include "qoptics/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace qoptics {

namespace {

using nlohmann::json;

json complex_pair(cplx z) { return json::array({z.real(), z.imag()}); }

cplx pair_value(const json &p) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        throw ParameterError("state data entries must be [re, im] pairs");
    return {p[0].get<double>(), p[1].get<double>()};
}

json axis_json(const Axis &a) {
    return {{"min", a.min}, {"max", a.max}, {"count", a.count}};
}

Axis axis_from(const json &j) {
    return Axis(j.at("min").get<double>(), j.at("max").get<double>(),
                j.at("count").get<int>());
}

double parse_double(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParameterError("malformed number '" + std::string(s) + "'");
    return v;
}

std::string csv_cell(const json &v) {
    if (v.is_number_float())
        return format_double(v.get<double>());
    if (v.is_number())
        return v.dump();
    if (v.is_boolean())
        return v.get<bool>() ? "true" : "false";
    if (v.is_string()) {
        const auto &s = v.get_ref<const std::string &>();
        if (s.find_first_of(",\"\n\r") == std::string::npos)
            return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"')
                q += '"';
            q += c;
        }
        return q + '"';
    }
    return v.dump();
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

json state_to_json(const PureState &state) {
    json data = json::array();
    for (Eigen::Index i = 0; i < state.amplitudes().size(); ++i)
        data.push_back(complex_pair(state.amplitudes()[i]));
    return {{"modes", state.modes()},
            {"cutoff", state.cutoff().dim()},
            {"kind", "pure"},
            {"data", std::move(data)}};
}

json state_to_json(const MixedState &state) {
    json data = json::array();
    const Matrix &m = state.matrix();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            data.push_back(complex_pair(m(r, c)));
    return {{"modes", state.modes()},
            {"cutoff", state.cutoff().dim()},
            {"kind", "mixed"},
            {"data", std::move(data)}};
}

json state_to_json(const FinalState &state) {
    return std::visit([](const auto &s) { return state_to_json(s); }, state);
}

FinalState state_from_json(const json &j) {
    try {
        const auto modes = j.at("modes").get<std::vector<std::string>>();
        const ModeSpace space(modes, Cutoff(j.at("cutoff").get<int>()));
        const std::string kind = j.at("kind").get<std::string>();
        const json &data = j.at("data");
        const auto n = static_cast<Eigen::Index>(space.dim());
        if (kind == "pure") {
            if (data.size() != space.dim())
                throw ParameterError("pure state data has the wrong length");
            Vector v(n);
            for (Eigen::Index i = 0; i < n; ++i)
                v[i] = pair_value(data[static_cast<std::size_t>(i)]);
            return PureState(space, std::move(v));
        }
        if (kind == "mixed") {
            if (data.size() != space.dim() * space.dim())
                throw ParameterError("mixed state data has the wrong length");
            Matrix m(n, n);
            for (Eigen::Index r = 0; r < n; ++r)
                for (Eigen::Index c = 0; c < n; ++c)
                    m(r, c) = pair_value(data[static_cast<std::size_t>(r * n + c)]);
            return MixedState(space, std::move(m));
        }
        throw ParameterError("state kind must be 'pure' or 'mixed'");
    } catch (const json::exception &e) {
        throw ParameterError(std::string("malformed state JSON: ") + e.what());
    }
}

std::string wigner_to_csv(const WignerGrid &grid) {
    std::string out = "re,im,W\n";
    for (int i = 0; i < grid.im.count; ++i)
        for (int j = 0; j < grid.re.count; ++j) {
            out += format_double(grid.re.at(j));
            out += ',';
            out += format_double(grid.im.at(i));
            out += ',';
            out += format_double(grid.values(i, j));
            out += '\n';
        }
    return out;
}

WignerGrid wigner_from_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != "re,im,W")
        throw ParameterError("Wigner CSV must start with the header re,im,W");
    std::vector<double> re, im, w;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw ParameterError("Wigner CSV rows need three columns");
        const std::string_view sv(line);
        re.push_back(parse_double(sv.substr(0, c1)));
        im.push_back(parse_double(sv.substr(c1 + 1, c2 - c1 - 1)));
        w.push_back(parse_double(sv.substr(c2 + 1)));
    }
    std::size_t nre = 1;
    while (nre < im.size() && im[nre] == im[0])
        ++nre;
    if (nre < 2 || re.size() % nre != 0)
        throw ParameterError("Wigner CSV is not a rectangular grid");
    const std::size_t nim = re.size() / nre;
    if (nim < 2)
        throw ParameterError("Wigner CSV is not a rectangular grid");
    WignerGrid grid{Axis(re.front(), re[nre - 1], static_cast<int>(nre)),
                    Axis(im.front(), im.back(), static_cast<int>(nim)),
                    Eigen::MatrixXd(static_cast<Eigen::Index>(nim),
                                    static_cast<Eigen::Index>(nre))};
    for (std::size_t i = 0; i < nim; ++i)
        for (std::size_t j = 0; j < nre; ++j)
            grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                w[i * nre + j];
    return grid;
}

json wigner_to_json(const WignerGrid &grid) {
    json values = json::array();
    for (Eigen::Index i = 0; i < grid.values.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < grid.values.cols(); ++j)
            row.push_back(grid.values(i, j));
        values.push_back(std::move(row));
    }
    return {{"re_axis", axis_json(grid.re)},
            {"im_axis", axis_json(grid.im)},
            {"values", std::move(values)}};
}

WignerGrid wigner_from_json(const json &j) {
    try {
        WignerGrid grid{axis_from(j.at("re_axis")), axis_from(j.at("im_axis")), {}};
        const json &values = j.at("values");
        if (values.size() != static_cast<std::size_t>(grid.im.count))
            throw ParameterError("Wigner JSON has the wrong number of rows");
        grid.values.resize(grid.im.count, grid.re.count);
        for (int i = 0; i < grid.im.count; ++i) {
            const json &row = values[static_cast<std::size_t>(i)];
            if (row.size() != static_cast<std::size_t>(grid.re.count))
                throw ParameterError("Wigner JSON row has the wrong length");
            for (int k = 0; k < grid.re.count; ++k)
                grid.values(i, k) = row[static_cast<std::size_t>(k)].get<double>();
        }
        return grid;
    } catch (const json::exception &e) {
        throw ParameterError(std::string("malformed Wigner JSON: ") + e.what());
    }
}

void Table::add(std::vector<json> row) {
    if (row.size() != columns.size())
        throw DimensionError("table row has " + std::to_string(row.size()) +
                             " cells, expected " + std::to_string(columns.size()));
    rows.push_back(std::move(row));
}

json Table::to_json() const {
    json out = json::array();
    for (const auto &row : rows) {
        json obj = json::object();
        for (std::size_t k = 0; k < columns.size(); ++k)
            obj[columns[k]] = row[k];
        out.push_back(std::move(obj));
    }
    return out;
}

std::string Table::to_csv() const {
    std::string out;
    for (std::size_t k = 0; k < columns.size(); ++k) {
        if (k)
            out += ',';
        out += columns[k];
    }
    out += '\n';
    for (const auto &row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k)
                out += ',';
            out += csv_cell(row[k]);
        }
        out += '\n';
    }
    return out;
}

json probabilities_to_json(const ProbabilityReport &report) {
    json heralds = json::array();
    for (const auto &h : report.heralds)
        heralds.push_back({{"mode", h.mode}, {"probability", h.probability}});
    json pairs = json::array();
    for (const auto &p : report.click_pairs)
        pairs.push_back({{"modes", {p.first, p.second}},
                         {"probability", p.probability}});
    return {{"herald_weight", report.herald_weight},
            {"heralds", std::move(heralds)},
            {"marginals", report.marginals},
            {"click", report.click},
            {"click_pairs", std::move(pairs)}};
}

void write_text(const std::string &path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open '" + path + "' for writing");
    out << text;
    if (!out)
        throw Error("failed writing '" + path + "'");
}

std::string read_text(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("file not found: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace qoptics
