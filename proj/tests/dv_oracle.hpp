#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "sympl/discrete.hpp"

// Explicit clock/shift matrices for checking symplectic actions by conjugation.
namespace testing::dv {

using sympl::discrete::Int;
using sympl::discrete::IMat;
using sympl::discrete::IVec;
using cd = std::complex<double>;
using CM = Eigen::MatrixXcd;
using sympl::discrete::mod;
using sympl::discrete::reduce;

inline cd root(Int d, double k) { return std::polar(1.0, 2 * std::numbers::pi * k / double(d)); }

inline CM clock(Int d) {
    CM Z = CM::Zero(d, d);
    for (Int j = 0; j < d; ++j) Z(j, j) = root(d, double(j));
    return Z;
}

inline CM shift(Int d) {
    CM X = CM::Zero(d, d);
    for (Int j = 0; j < d; ++j) X((j + 1) % d, j) = 1;
    return X;
}

inline CM kron(const CM& A, const CM& B) {
    CM K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

inline CM mpow(const CM& A, Int k) {
    CM R = CM::Identity(A.rows(), A.cols());
    for (Int i = 0; i < k; ++i) R = R * A;
    return R;
}

// D(u) = ⊗ Z^q X^p
inline CM weyl(const IVec& u, Int d) {
    CM D = CM::Identity(1, 1);
    for (Eigen::Index j = 0; j < u.size() / 2; ++j)
        D = kron(D, CM(mpow(clock(d), mod(u(2 * j), d)) * mpow(shift(d), mod(u(2 * j + 1), d))));
    return D;
}

inline CM fourier(Int d) {
    CM F(d, d);
    for (Int j = 0; j < d; ++j)
        for (Int k = 0; k < d; ++k) F(k, j) = root(d, double(j * k)) / std::sqrt(double(d));
    return F;
}

inline CM phase_gate(Int d) {
    CM P = CM::Zero(d, d);
    for (Int j = 0; j < d; ++j) {
        if (d % 2) P(j, j) = root(d, double(j * (j - 1) / 2));
        else P(j, j) = std::polar(1.0, std::numbers::pi * double(j * j) / double(d));
    }
    return P;
}

// SUM on (control, target) of two qudits: |a, b> -> |a, a+b>
inline CM sum_gate(Int d, bool control_first) {
    CM U = CM::Zero(d * d, d * d);
    for (Int a = 0; a < d; ++a)
        for (Int b = 0; b < d; ++b) {
            if (control_first) U(a * d + (a + b) % d, a * d + b) = 1;
            else U(((a + b) % d) * d + b, a * d + b) = 1;
        }
    return U;
}

inline CM embed1(const CM& U, int q, int n, Int d) {
    CM R = CM::Identity(1, 1);
    for (int k = 0; k < n; ++k) R = kron(R, k == q ? U : CM(CM::Identity(d, d)));
    return R;
}

// A = c·B for some unit c
inline bool proportional(const CM& A, const CM& B) {
    Eigen::Index i, j;
    B.cwiseAbs().maxCoeff(&i, &j);
    if (std::abs(B(i, j)) < 1e-9) return false;
    cd c = A(i, j) / B(i, j);
    return std::abs(std::abs(c) - 1) < 1e-9 && (A - c * B).cwiseAbs().maxCoeff() < 1e-9;
}

// U D(e_k) U† ∝ D(Sᵗ e_k) for every generator
inline bool conjugation_agrees(const CM& U, const IMat& S, int n, Int d) {
    for (int k = 0; k < 2 * n; ++k) {
        IVec e = IVec::Zero(2 * n);
        e(k) = 1;
        IVec img = reduce(IVec(S.transpose() * e), d);
        if (!proportional(U * weyl(e, d) * U.adjoint(), weyl(img, d))) return false;
    }
    return true;
}

}  // namespace testing::dv
