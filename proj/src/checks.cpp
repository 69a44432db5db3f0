#include "qoptics/checks.hpp"

#include <cmath>
#include <functional>

#include "qoptics/elements.hpp"

namespace qoptics {

namespace {

/// Max |lhs(i, j) - rhs(i, j)| over rows and columns admitted by `keep`.
double masked_defect(const Matrix &lhs, const Matrix &rhs, const ModeSpace &space,
                     const std::function<bool(const std::vector<int> &)> &keep) {
    std::vector<bool> ok(space.dim());
    for (std::size_t i = 0; i < space.dim(); ++i)
        ok[i] = keep(space.digits(i));
    double worst = 0.0;
    for (Eigen::Index i = 0; i < lhs.rows(); ++i) {
        if (!ok[static_cast<std::size_t>(i)])
            continue;
        for (Eigen::Index j = 0; j < lhs.cols(); ++j)
            if (ok[static_cast<std::size_t>(j)])
                worst = std::max(worst, std::abs(lhs(i, j) - rhs(i, j)));
    }
    return worst;
}

} // namespace

double commutator_defect(int d) {
    const Cutoff cutoff(d);
    const Matrix a = annihilation_matrix(cutoff).matrix();
    const Matrix comm = a * a.adjoint() - a.adjoint() * a;
    Matrix expected = Matrix::Identity(d, d);
    expected(d - 1, d - 1) = -(d - 1.0);
    return (comm - expected).cwiseAbs().maxCoeff();
}

double beam_splitter_conjugation_defect(double T, int d) {
    const Cutoff cutoff(d);
    const BeamSplitterParams p(T, "x", "y");
    const ModeSpace space({"x", "y"}, cutoff);
    const Matrix u = beam_splitter_unitary(p, cutoff).matrix();
    const Matrix x = embed(annihilation_matrix(cutoff, "x"), space).matrix();
    const Matrix y = embed(annihilation_matrix(cutoff, "y"), space).matrix();
    auto low = [d](const std::vector<int> &n) { return n[0] + n[1] < d; };
    const double ex =
        masked_defect(u * x * u.adjoint(), p.t() * x + p.r() * y, space, low);
    const double ey =
        masked_defect(u * y * u.adjoint(), p.t() * y - p.r() * x, space, low);
    return std::max(ex, ey);
}

double squeezer_conjugation_defect(double s, int d) {
    const Cutoff cutoff(d);
    const SqueezerParams p(s, "a", "d");
    const ModeSpace space({"a", "d"}, cutoff);
    const Matrix sq = two_mode_squeezer_unitary(p, cutoff).matrix();
    const Matrix a = embed(annihilation_matrix(cutoff, "a"), space).matrix();
    const Matrix b = embed(annihilation_matrix(cutoff, "d"), space).matrix();
    auto low = [d](const std::vector<int> &n) {
        return 2 * n[0] <= d && 2 * n[1] <= d;
    };
    return masked_defect(sq * a * sq.adjoint(), p.mu() * a + p.nu() * b.adjoint(),
                         space, low);
}

double hom_defect(int d) {
    const Cutoff cutoff(d);
    const ModeSpace space({"x", "y"}, cutoff);
    const BeamSplitterParams p(0.5, "x", "y");
    Vector in = Vector::Zero(static_cast<Eigen::Index>(space.dim()));
    const int one_one[] = {1, 1};
    in[static_cast<Eigen::Index>(space.flat_index(one_one))] = 1.0;
    const PureState out =
        apply(beam_splitter_unitary(p, cutoff), PureState(space, std::move(in)));
    Vector target = Vector::Zero(static_cast<Eigen::Index>(space.dim()));
    const int two_zero[] = {2, 0};
    const int zero_two[] = {0, 2};
    target[static_cast<Eigen::Index>(space.flat_index(two_zero))] = 1.0 / std::sqrt(2.0);
    target[static_cast<Eigen::Index>(space.flat_index(zero_two))] = -1.0 / std::sqrt(2.0);
    const cplx overlap = target.dot(out.amplitudes());
    const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : 1.0;
    return (out.amplitudes() - phase * target).cwiseAbs().maxCoeff();
}

} // namespace qoptics
