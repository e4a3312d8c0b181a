#include "sympl/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

namespace sympl::states {

namespace {

std::vector<int> coords_of(const std::vector<int>& modes) {
    std::vector<int> c;
    for (int j : modes) {
        c.push_back(2 * j);
        c.push_back(2 * j + 1);
    }
    return c;
}

Mat select(const Mat& A, const std::vector<int>& rows, const std::vector<int>& cols) {
    Mat B(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) B(i, j) = A(rows[i], cols[j]);
    return B;
}

Vec select(const Vec& x, const std::vector<int>& idx) {
    Vec y(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) y(i) = x(idx[i]);
    return y;
}

void check_modes(const GaussianState& s, const std::vector<int>& modes, const char* what) {
    std::vector<int> sorted = modes;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        fail("PartitionInvalid", std::string(what) + ": repeated mode index");
    for (int j : modes)
        if (j < 0 || j >= s.n_modes())
            fail("PartitionInvalid", std::string(what) + ": mode index out of range");
}

std::vector<int> complement(int n, const std::vector<int>& modes) {
    std::vector<int> rest;
    for (int j = 0; j < n; ++j)
        if (std::find(modes.begin(), modes.end(), j) == modes.end()) rest.push_back(j);
    return rest;
}

// Pseudo-inverse and log pseudo-determinant of a symmetric PSD matrix.
struct SymPinv {
    Mat inv;
    double logdet = 0.0;
    int rank = 0;
};

SymPinv sym_pinv(const Mat& A, double cutoff) {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(A));
    SymPinv r;
    r.inv = Mat::Zero(A.rows(), A.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        double ev = es.eigenvalues()(i);
        if (ev > cutoff) {
            r.inv += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose() / ev;
            r.logdet += std::log(ev);
            ++r.rank;
        }
    }
    return r;
}

// Gaussian conditioning of x on y = Fᵗ x_m + noise, cov(y) = Fᵗ V_mm F + extra.
ConditionalResult condition(const GaussianState& s, const std::vector<int>& measured,
                            const Mat& F, const Mat& extra, const Vec& outcome) {
    check_modes(s, measured, "measurement");
    const std::vector<int> keep = complement(s.n_modes(), measured);
    if (keep.empty()) fail("PartitionInvalid", "measurement leaves no unmeasured modes");
    const std::vector<int> cm = coords_of(measured), ck = coords_of(keep);
    if (F.rows() != Eigen::Index(cm.size()))
        fail("DimensionMismatch", "measurement plane does not match measured modes");
    if (outcome.size() != F.cols()) fail("DimensionMismatch", "outcome has wrong length");

    Mat Vmm = select(s.V, cm, cm), Vkm = select(s.V, ck, cm), Vkk = select(s.V, ck, ck);
    Vec xm = select(s.x_bar, cm), xk = select(s.x_bar, ck);
    Mat Sy = symmetrize(F.transpose() * Vmm * F + extra);
    double cutoff = 1e-12 * std::max(1.0, s.V.cwiseAbs().maxCoeff());
    SymPinv p = sym_pinv(Sy, cutoff);
    Vec r = outcome - F.transpose() * xm;
    Mat gain = Vkm * F * p.inv;

    ConditionalResult out;
    out.state.x_bar = xk + gain * r;
    out.state.V = symmetrize(Vkk - gain * F.transpose() * Vkm.transpose());
    out.state.ordering = s.ordering;
    double q = r.dot(p.inv * r);
    out.density = std::exp(-0.5 * q - 0.5 * p.logdet -
                           0.5 * p.rank * std::log(2.0 * std::numbers::pi));
    return out;
}

// Embed a symplectic acting on `modes` (in that order) into the n-mode space.
Mat embed_modes(const Mat& S, const std::vector<int>& modes, int n) {
    Mat big = Mat::Identity(2 * n, 2 * n);
    const std::vector<int> c = coords_of(modes);
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = 0; j < c.size(); ++j) big(c[i], c[j]) = S(i, j);
    return big;
}

}  // namespace

GaussianState make_state(const Vec& x_bar, const Mat& V) {
    if (x_bar.size() % 2 || x_bar.size() == 0 || V.rows() != x_bar.size() || V.cols() != x_bar.size())
        fail("DimensionMismatch", "state moments have inconsistent dimensions");
    return {x_bar, V, ModeOrdering::Interleaved};
}

GaussianState vacuum(int n) {
    if (n < 1) fail("DimensionMismatch", "n_modes must be >= 1");
    return {Vec::Zero(2 * n), Mat::Identity(2 * n, 2 * n), ModeOrdering::Interleaved};
}

GaussianState coherent(const Vec& u) {
    if (u.size() % 2 || u.size() == 0) fail("DimensionMismatch", "coherent amplitude needs even length");
    return {u, Mat::Identity(u.size(), u.size()), ModeOrdering::Interleaved};
}

GaussianState thermal(const std::vector<double>& nbar) {
    const int n = int(nbar.size());
    GaussianState s = vacuum(n);
    for (int j = 0; j < n; ++j) {
        if (!(nbar[j] >= 0.0)) fail("NegativeOccupation", "thermal occupation must be >= 0");
        s.V(2 * j, 2 * j) = s.V(2 * j + 1, 2 * j + 1) = 2.0 * nbar[j] + 1.0;
    }
    return s;
}

GaussianState squeezed_vacuum(const std::vector<double>& xi) {
    const int n = int(xi.size());
    GaussianState s = vacuum(n);
    for (int j = 0; j < n; ++j) {
        s.V(2 * j, 2 * j) = std::exp(-2.0 * xi[j]);
        s.V(2 * j + 1, 2 * j + 1) = std::exp(2.0 * xi[j]);
    }
    return s;
}

GaussianState two_mode_squeezed(double r) {
    GaussianState s = vacuum(2);
    double c = std::cosh(2.0 * r), sh = std::sinh(2.0 * r);
    s.V.diagonal().setConstant(c);
    s.V(0, 2) = s.V(2, 0) = sh;
    s.V(1, 3) = s.V(3, 1) = -sh;
    return s;
}

double physicality_margin(const GaussianState& s) {
    const int n = s.n_modes();
    CMat H = s.V.cast<std::complex<double>>() +
             std::complex<double>(0.0, 1.0) * omega_matrix(n).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (H + H.adjoint()));
    return es.eigenvalues().minCoeff();
}

bool is_physical(const GaussianState& s, double tol) {
    if ((s.V - s.V.transpose()).cwiseAbs().maxCoeff() > tol) return false;
    return physicality_margin(s) >= -tol;
}

GaussianState apply_gaussian_unitary(const GaussianState& s, const Mat& S, const Vec& shift) {
    if (S.rows() != s.x_bar.size() || S.cols() != s.x_bar.size() || shift.size() != s.x_bar.size())
        fail("DimensionMismatch", "apply_gaussian_unitary: dimension mismatch");
    return {S * s.x_bar + shift, symmetrize(S * s.V * S.transpose()), s.ordering};
}

GaussianState apply_gaussian_unitary(const GaussianState& s, const Mat& S) {
    return apply_gaussian_unitary(s, S, Vec::Zero(s.x_bar.size()));
}

double wigner_eval(const GaussianState& s, const Vec& u) {
    if (u.size() != s.x_bar.size()) fail("DimensionMismatch", "wigner_eval: point has wrong length");
    Eigen::LLT<Mat> llt(symmetrize(s.V));
    if (llt.info() != Eigen::Success) fail("SingularCovariance", "wigner_eval needs invertible V");
    Vec d = u - s.x_bar;
    Vec y = llt.matrixL().solve(d);
    double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const int n = s.n_modes();
    return std::exp(-0.5 * y.squaredNorm() - 0.5 * logdet - n * std::log(2.0 * std::numbers::pi));
}

std::complex<double> characteristic_eval(const GaussianState& s, const Vec& v) {
    if (v.size() != s.x_bar.size())
        fail("DimensionMismatch", "characteristic_eval: point has wrong length");
    Mat O = omega_matrix(s.n_modes());
    Vec w = O.transpose() * v;
    double re = -0.5 * w.dot(s.V * w);
    double im = s.x_bar.dot(O * v);
    return std::exp(std::complex<double>(re, im));
}

GaussianState tensor(const GaussianState& a, const GaussianState& b) {
    Vec x(a.x_bar.size() + b.x_bar.size());
    x << a.x_bar, b.x_bar;
    return {x, direct_sum(a.V, b.V), a.ordering};
}

GaussianState partial_trace(const GaussianState& s, const std::vector<int>& keep) {
    if (keep.empty()) fail("PartitionInvalid", "partial_trace: empty keep set");
    check_modes(s, keep, "partial_trace");
    const std::vector<int> c = coords_of(keep);
    return {select(s.x_bar, c), select(s.V, c, c), s.ordering};
}

ConditionalResult condition_on_homodyne(const GaussianState& s, const std::vector<int>& measured,
                                        const SubspaceBasis& plane, const Vec& eta) {
    const Eigen::Index m = Eigen::Index(measured.size());
    if (plane.F.rows() != 2 * m || plane.F.cols() != m)
        fail("DimensionMismatch", "homodyne plane must be 2m x m");
    if (classify_subspace(plane.F) != SubspaceKind::Lagrangian)
        fail("NotLagrangian", "homodyne plane must be Lagrangian");
    return condition(s, measured, plane.F, Mat::Zero(m, m), eta);
}

ConditionalResult condition_on_general_dyne(const GaussianState& s,
                                            const std::vector<int>& measured,
                                            const Mat& povm_cov, const Vec& outcome) {
    const Eigen::Index d = 2 * Eigen::Index(measured.size());
    if (povm_cov.rows() != d || povm_cov.cols() != d)
        fail("DimensionMismatch", "POVM covariance does not match measured modes");
    return condition(s, measured, Mat::Identity(d, d), povm_cov, outcome);
}

Mat beamsplitter_h(double tau, int m) {
    if (!(tau >= 0.0 && tau <= 1.0)) fail("InvalidParameter", "transmittance must lie in [0,1]");
    const Eigen::Index k = 2 * m;
    Mat I = Mat::Identity(k, k);
    Mat H(2 * k, 2 * k);
    double a = std::sqrt(1.0 - tau), b = std::sqrt(tau);
    H << a * I, b * I, -b * I, a * I;
    return H;
}

ConditionalResult measure(const GaussianState& s, const std::vector<int>& measured,
                          const MeasurementSpec& spec, const Vec& outcome) {
    if (const auto* h = std::get_if<IdealHomodyne>(&spec))
        return condition_on_homodyne(s, measured, h->plane, outcome);
    if (std::holds_alternative<IdealHeterodyne>(spec)) {
        const Eigen::Index d = 2 * Eigen::Index(measured.size());
        return condition_on_general_dyne(s, measured, Mat::Identity(d, d), outcome);
    }
    const auto& g = std::get<GeneralDyne>(spec);
    check_modes(s, measured, "measurement");
    const int n = s.n_modes(), ne = g.env.n_modes();
    GaussianState joint = tensor(s, g.env);
    std::vector<int> mixed = measured;
    for (int j = 0; j < ne; ++j) mixed.push_back(n + j);
    if (g.mix.rows() != 2 * Eigen::Index(mixed.size()))
        fail("DimensionMismatch", "general-dyne mixing matrix has wrong size");
    joint = apply_gaussian_unitary(joint, embed_modes(g.mix, mixed, n + ne));
    return condition_on_homodyne(joint, mixed, g.plane, outcome);
}

Mat plane_squeezer(const SubspaceBasis& plane, double zeta) {
    if (!(zeta > 0.0)) fail("InvalidParameter", "zeta must be positive");
    if (plane.F.rows() != 2 * plane.F.cols() || classify_subspace(plane.F) != SubspaceKind::Lagrangian)
        fail("NotLagrangian", "plane must be a Lagrangian plane of the whole space");
    const int n = int(plane.F.cols());
    Mat Q = plane.F.householderQr().householderQ() * Mat::Identity(2 * n, n);
    Mat P = omega_matrix(n) * Q;
    return zeta * Q * Q.transpose() + (1.0 / zeta) * P * P.transpose();
}

GaussianState approx_inf_squeezed(const GaussianState& s, const SubspaceBasis& plane, double zeta) {
    return apply_gaussian_unitary(s, plane_squeezer(plane, zeta));
}

}  // namespace sympl::states
