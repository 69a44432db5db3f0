#include "qoptics/circuit.hpp"

#include <charconv>
#include <sstream>

namespace qoptics {

namespace {

std::string num(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

struct StatementPrinter {
    std::ostream &os;

    void operator()(const BeamSplitterStatement &st) const {
        os << "bs " << st.transmitted << ' ' << st.reflected << " T=" << num(st.T)
           << '\n';
    }
    void operator()(const SqueezerStatement &st) const {
        os << "tmsq " << st.signal << ' ' << st.idler << " s=" << num(st.s)
           << '\n';
    }
    void operator()(const HeraldStatement &st) const {
        os << "herald " << st.mode << ' ';
        switch (st.requirement.kind) {
        case Requirement::Kind::click: os << "click"; break;
        case Requirement::Kind::no_click: os << "noclick"; break;
        case Requirement::Kind::exactly:
            os << "exactly " << st.requirement.count;
            break;
        case Requirement::Kind::unmeasured: os << "unmeasured"; break;
        }
        if (st.detector.efficiency != 1.0)
            os << " eta=" << num(st.detector.efficiency);
        if (st.detector.kind == DetectorKind::on_off)
            os << " onoff";
        os << '\n';
    }
};

} // namespace

std::string print_circuit(const CircuitSpec &spec) {
    std::ostringstream os;
    os << "modes";
    for (const auto &m : spec.modes)
        os << ' ' << m;
    os << '\n';
    for (const auto &in : spec.inputs) {
        os << "input " << in.mode << ' ';
        switch (in.input.kind) {
        case InputSpec::Kind::vacuum: os << "vacuum"; break;
        case InputSpec::Kind::coherent:
            os << "coherent " << num(in.input.alpha.real()) << ' '
               << num(in.input.alpha.imag());
            break;
        case InputSpec::Kind::thermal: os << "thermal " << num(in.input.nbar); break;
        case InputSpec::Kind::fock: os << "fock " << in.input.n; break;
        }
        os << '\n';
    }
    for (const auto &st : spec.statements)
        std::visit(StatementPrinter{os}, st);
    for (const auto &out : spec.outputs) {
        switch (out.kind) {
        case OutputRequest::Kind::wigner:
            os << "out wigner " << out.mode << ' ' << num(out.axis.min) << ':'
               << num(out.axis.max) << ':' << out.axis.count << '\n';
            break;
        case OutputRequest::Kind::fidelity:
            os << "out fidelity " << out.mode << " input\n";
            break;
        case OutputRequest::Kind::probs: os << "out probs\n"; break;
        case OutputRequest::Kind::state: os << "out state\n"; break;
        }
    }
    return os.str();
}

} // namespace qoptics
