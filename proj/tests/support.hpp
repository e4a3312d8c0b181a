#pragma once

#include <cmath>
#include <random>

#include "sympl/core.hpp"

namespace testing {

using sympl::Mat;
using sympl::Vec;

inline double max_abs(const Mat& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }
inline double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

inline Mat random_matrix(int r, int c, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> nd(0.0, scale);
    return Mat::NullaryExpr(r, c, [&] { return nd(rng); });
}

inline Mat random_symmetric(int n, std::mt19937_64& rng, double scale = 1.0) {
    Mat A = random_matrix(n, n, rng, scale);
    return 0.5 * (A + A.transpose());
}

// Ω built entry by entry, independent of the library.
inline Mat omega_ref(int n) {
    Mat O = Mat::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        O(2 * j, 2 * j + 1) = -1;
        O(2 * j + 1, 2 * j) = 1;
    }
    return O;
}

inline double sympl_err(const Mat& S) {
    int n = int(S.rows() / 2);
    return max_abs(Mat(S.transpose() * omega_ref(n) * S - omega_ref(n)));
}

// exp by scaling and squaring of a truncated Taylor series
inline Mat expm_ref(const Mat& A) {
    int s = std::max(0, int(std::ceil(std::log2(std::max(1.0, A.cwiseAbs().rowwise().sum().maxCoeff())))) + 2);
    Mat B = A / std::pow(2.0, s);
    Mat term = Mat::Identity(A.rows(), A.cols()), sum = term;
    for (int k = 1; k < 30; ++k) {
        term = term * B / k;
        sum += term;
    }
    for (int k = 0; k < s; ++k) sum = sum * sum;
    return sum;
}

}  // namespace testing
