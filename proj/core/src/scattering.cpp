#include "sympl/scattering.hpp"

#include <cmath>
#include <complex>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace sympl::scattering {

namespace {

using cd = std::complex<double>;

double max_abs(const Mat& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }
double max_abs(const CMat& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

void check_square(const CMat& A, int n, const char* what) {
    if (A.rows() != n || A.cols() != n)
        fail("ShapeMismatch", std::string(what) + " must be " + std::to_string(n) + "x" + std::to_string(n));
}

void check_square(const Mat& A, int n, const char* what) {
    if (A.rows() != n || A.cols() != n)
        fail("ShapeMismatch", std::string(what) + " must be " + std::to_string(n) + "x" + std::to_string(n));
}

ScatteringResult finish(Mat S, const Mat& Omega, double tol) {
    ScatteringResult r;
    r.residual = max_abs(Mat(S.transpose() * Omega * S - Omega));
    r.symplectic = r.residual <= tol * std::max(1.0, max_abs(S) * max_abs(S));
    r.S = std::move(S);
    return r;
}

Mat kron(const Mat& A, const Mat& B) { return Eigen::kroneckerProduct(A, B).eval(); }

}  // namespace

void validate(const QuadraticHamiltonian& H, double tol) {
    int n = int(H.Y.rows());
    check_square(H.Y, n, "Y");
    check_square(H.W, n, "W");
    double scale = std::max({1.0, max_abs(H.Y), max_abs(H.W)});
    if (max_abs(CMat(H.Y - H.Y.adjoint())) > tol * scale) fail("InvalidHamiltonian", "Y is not Hermitian");
    if (max_abs(CMat(H.W - H.W.transpose())) > tol * scale) fail("InvalidHamiltonian", "W is not symmetric");
}

Mat hamiltonian_generator(const CMat& Y, const CMat& W) {
    validate({Y, W});
    int n = int(Y.rows());
    Mat G(2 * n, 2 * n);
    G.topLeftCorner(n, n) = (Y + W).imag();
    G.topRightCorner(n, n) = (Y - W).real();
    G.bottomLeftCorner(n, n) = -(Y + W).real();
    G.bottomRightCorner(n, n) = (Y - W).imag();
    return G;
}

Mat hamiltonian_flow(const CMat& Y, const CMat& W, double t) {
    Mat A = hamiltonian_generator(Y, W) * t;
    return A.exp();
}

Mat mode_to_quadrature(const CMat& X, double tol) {
    int n = modes_of(X.real());
    CMat O(2 * n, 2 * n);
    CMat I = CMat::Identity(n, n);
    const cd i(0.0, 1.0);
    O << I, i * I, I, -i * I;
    O /= std::sqrt(2.0);
    CMat R = O.adjoint() * X * O;  // O is unitary
    if (max_abs(Mat(R.imag())) > tol * std::max(1.0, max_abs(X)))
        fail("NotReal", "coupling matrix has no real quadrature form");
    return R.real();
}

CMat diagonal_mode_matrix(const Eigen::VectorXcd& d) {
    int n = int(d.size());
    CMat X = CMat::Zero(2 * n, 2 * n);
    X.topLeftCorner(n, n) = d.asDiagonal();
    X.bottomRightCorner(n, n) = d.conjugate().asDiagonal();
    return X;
}

ScatteringResult passive_scattering(const CMat& Y, const Mat& B, const Mat& C, const Mat& D,
                                    double omega, double tol) {
    int n = int(Y.rows());
    check_square(B, 2 * n, "B");
    check_square(C, 2 * n, "C");
    check_square(D, 2 * n, "D");
    Mat Om = omega_matrix(n, ModeOrdering::Grouped);
    Mat R = hamiltonian_generator(Y, CMat::Zero(n, n)) + omega * Om + 0.5 * B;
    Eigen::PartialPivLU<Mat> lu(R);
    if (!(lu.rcond() > 1e-13)) fail("SingularResolvent", "Hm + ωΩ + B/2 is singular");
    Mat S = Mat::Identity(2 * n, 2 * n) + D * lu.solve(C);
    return finish(std::move(S), Om, tol);
}

ActiveParameters normalize_active(const QuadraticHamiltonian& H, const Vec& B, const Vec& C,
                                  const Vec& D, double omega) {
    validate(H);
    int n = H.n_modes();
    if (B.size() != n || C.size() != n || D.size() != n)
        fail("ShapeMismatch", "coupling vectors must have one entry per mode");
    if (!(omega >= 0.0)) fail("InvalidParameter", "active scattering needs ω >= 0");
    for (int j = 0; j < n; ++j)
        if (B(j) == 0.0 || C(j) == 0.0 || D(j) == 0.0) fail("InvalidParameter", "zero coupling");
    Vec ci = C.cwiseInverse(), di = D.cwiseInverse();
    ActiveParameters p;
    p.Y = ci.asDiagonal() * H.Y * di.asDiagonal();
    p.W = ci.asDiagonal() * H.W * di.asDiagonal();
    p.Gamma = (0.5 * B.cwiseProduct(ci).cwiseProduct(di)).asDiagonal();
    p.Theta = (omega * B.cwiseInverse()).asDiagonal();
    return p;
}

Mat active_assembly(const CMat& Y, const CMat& W, const Mat& Theta, const Mat& Gamma) {
    validate({Y, W});
    int n = int(Y.rows());
    check_square(Theta, n, "Theta");
    check_square(Gamma, n, "Gamma");
    Clifford cl = clifford_basis();
    const Mat& e1 = cl.e[0];
    const Mat& e2 = cl.e[1];
    const Mat& e3 = cl.e[2];
    Mat I4 = Mat::Identity(4, 4);
    return kron(I4, Mat(Y.imag()) + Gamma) - kron(e1, W.real()) + kron(e2, W.imag())
         - kron(e1 * e2, Y.real()) + kron(e1 * e2 * e3, Theta);
}

ScatteringResult active_scattering(const CMat& Y, const CMat& W, const Mat& Theta, const Mat& Gamma,
                                   double tol) {
    int n = int(Y.rows());
    Mat A = active_assembly(Y, W, Theta, Gamma);
    Eigen::PartialPivLU<Mat> lu(A);
    if (!(lu.rcond() > 1e-13)) fail("SingularAssembly", "Kronecker-assembled matrix is singular");
    Mat S = Mat::Identity(4 * n, 4 * n) - lu.inverse();
    return finish(std::move(S), sideband_omega(n), tol);
}

ScatteringResult active_scattering(const ActiveParameters& p, double tol) {
    return active_scattering(p.Y, p.W, p.Theta, p.Gamma, tol);
}

Mat sideband_omega(int n_modes) {
    Clifford cl = clifford_basis();
    return kron(cl.e[0] * cl.e[1], Mat::Identity(n_modes, n_modes));
}

Mat fold_sidebands(const Mat& S4, double tol) {
    if (S4.rows() != S4.cols() || S4.rows() % 4 != 0) fail("ShapeMismatch", "expected a 4N×4N matrix");
    int m = int(S4.rows() / 2);
    Mat A = S4.topLeftCorner(m, m), Bm = S4.topRightCorner(m, m);
    double scale = std::max(1.0, max_abs(S4));
    if (max_abs(Mat(S4.bottomRightCorner(m, m) - A)) > tol * scale ||
        max_abs(Mat(S4.bottomLeftCorner(m, m) - Bm)) > tol * scale)
        fail("InvalidParameter", "sidebands are not degenerate (ω != 0?)");
    return A + Bm;
}

Clifford clifford_basis() {
    Clifford c;
    const cd i(0.0, 1.0);
    CMat eps1(4, 4), eps2(4, 4), eps3(4, 4);
    eps1 << 0, 1, 0, 0,
            -1, 0, 0, 0,
            0, 0, 0, 1,
            0, 0, -1, 0;
    eps1 *= i;
    eps2 << 0, 1, 0, 0,
            1, 0, 0, 0,
            0, 0, 0, 1,
            0, 0, 1, 0;
    eps3 = Eigen::Vector4cd(1, -1, -1, 1).asDiagonal();
    c.eps = {eps1, eps2, eps3};

    Mat e1 = Mat::Zero(4, 4), e2(4, 4), e3(4, 4);
    for (int k = 0; k < 4; ++k) e1(k, 3 - k) = 1;
    e2 << 0, 0, 1, 0,
          0, 0, 0, -1,
          1, 0, 0, 0,
          0, -1, 0, 0;
    e3 = Eigen::Vector4d(1, 1, -1, -1).asDiagonal();
    c.e = {e1, e2, e3};

    c.U.resize(4, 4);
    c.U << 1, i, 0, 0,
           0, 0, 1, -i,
           0, 0, 1, i,
           1, -i, 0, 0;
    c.U /= std::sqrt(2.0);
    return c;
}

CayleyHamiltonian cayley_hamiltonian(const Mat& S, const Mat& Omega) {
    if (S.rows() != S.cols() || Omega.rows() != S.rows() || Omega.cols() != S.cols())
        fail("ShapeMismatch", "S and Ω must be square of equal size");
    Eigen::PartialPivLU<Mat> lu(Mat::Identity(S.rows(), S.cols()) - S);
    if (!(lu.rcond() > 1e-14)) fail("SingularIdMinusS", "Id - S is singular");
    Mat G = lu.inverse() - 0.5 * Mat::Identity(S.rows(), S.cols());
    // Ω⁻¹ = -Ω
    Mat M = -Omega * G;
    CayleyHamiltonian r;
    r.asymmetry = max_abs(Mat(M - M.transpose()));
    r.M = symmetrize(M);
    return r;
}

CayleyHamiltonian cayley_hamiltonian(const Mat& S) {
    return cayley_hamiltonian(S, omega_matrix(modes_of(S), ModeOrdering::Grouped));
}

Mat to_transduction_labels(const Mat& S_grouped) {
    if (modes_of(S_grouped) != 2) fail("ShapeMismatch", "two-mode matrix expected");
    Mat S = to_interleaved(S_grouped);
    // π phase on mode 2, then exchange the output ports
    Mat R = Eigen::Vector4d(1, 1, -1, -1).asDiagonal();
    Mat X = Mat::Zero(4, 4);
    X(0, 2) = X(1, 3) = X(2, 0) = X(3, 1) = 1;
    return X * R * S * R;
}

Mat passive_two_mode(double chi, double kappa1, double kappa2) {
    if (!(chi >= 0.0) || !(kappa1 > 0.0) || !(kappa2 > 0.0)) fail("InvalidParameter", "χ >= 0, κ > 0 required");
    double g = 0.5 * std::sqrt(chi * kappa1 * kappa2);
    CMat Y = CMat::Zero(2, 2);
    Y(0, 1) = Y(1, 0) = g;
    Vec k(4);
    k << kappa1, kappa2, kappa1, kappa2;
    Mat B = k.asDiagonal();
    Mat C = k.cwiseSqrt().asDiagonal();
    return to_transduction_labels(passive_scattering(Y, B, C, -C, 0.0).S);
}

Mat active_two_mode(double chi, double kappa1, double kappa2) {
    if (!(chi >= 0.0) || !(kappa1 > 0.0) || !(kappa2 > 0.0)) fail("InvalidParameter", "χ >= 0, κ > 0 required");
    double g = 0.5 * std::sqrt(chi * kappa1 * kappa2);
    QuadraticHamiltonian H{CMat::Zero(2, 2), CMat::Zero(2, 2)};
    H.W(0, 1) = H.W(1, 0) = g;
    Vec B(2), C(2);
    B << kappa1, kappa2;
    C = B.cwiseSqrt();
    auto p = normalize_active(H, B, C, C, 0.0);
    return to_transduction_labels(fold_sidebands(active_scattering(p).S));
}

}  // namespace sympl::scattering
