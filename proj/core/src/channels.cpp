#include "sympl/channels.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

namespace sympl::channels {

namespace {

bool is_square_even(const Mat& A) { return A.rows() == A.cols() && A.rows() % 2 == 0 && A.rows() > 0; }

double rel_det_abs(const Mat& A) {
    // |det| of a matrix whose entries are O(1): use the smallest singular value as guard
    Eigen::JacobiSVD<Mat> svd(A);
    const Vec& s = svd.singularValues();
    return s(s.size() - 1) / std::max(1.0, s(0));
}

Mat min_norm_pinv(const Mat& A) {
    return Eigen::CompleteOrthogonalDecomposition<Mat>(A).pseudoInverse();
}

}  // namespace

GaussianChannel make_channel(const Mat& T, const Mat& N, const Vec& d) {
    if (T.rows() % 2 || T.cols() % 2 || T.rows() == 0 || T.cols() == 0)
        fail("DimensionMismatch", "channel T must map between even-dimensional spaces");
    if (N.rows() != T.rows() || N.cols() != T.rows())
        fail("DimensionMismatch", "channel N must be square with T's row count");
    double scale = std::max(1.0, N.cwiseAbs().maxCoeff());
    if ((N - N.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        fail("NotSymmetric", "channel N must be symmetric");
    Vec dd = d.size() == 0 ? Vec::Zero(T.rows()) : d;
    if (dd.size() != T.rows()) fail("DimensionMismatch", "channel displacement has wrong length");
    return {T, symmetrize(N), dd};
}

GaussianChannel identity_channel(int n) {
    return make_channel(Mat::Identity(2 * n, 2 * n), Mat::Zero(2 * n, 2 * n));
}

GaussianChannel unitary_channel(const Mat& S, const Vec& d) {
    return make_channel(S, Mat::Zero(S.rows(), S.rows()), d);
}

double cp_margin(const GaussianChannel& c) {
    const int no = int(c.T.rows() / 2), ni = int(c.T.cols() / 2);
    const std::complex<double> i(0.0, 1.0);
    Mat X = c.T * omega_matrix(ni) * c.T.transpose();
    CMat H = c.N.cast<std::complex<double>>() +
             i * (omega_matrix(no) - X).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (H + H.adjoint()));
    return es.eigenvalues().minCoeff();
}

bool is_cp(const GaussianChannel& c, double tol) { return cp_margin(c) >= -tol; }

GaussianChannel random_cp_channel(int n_modes, std::uint64_t seed, double t_scale, double slack) {
    if (n_modes < 1) fail("InvalidParameter", "need at least one mode");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    const int m = 2 * n_modes;
    Mat T(m, m), A(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) T(i, j) = t_scale * g(rng) / std::sqrt(double(m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) A(i, j) = g(rng) / std::sqrt(double(m));
    Mat N = A * A.transpose();
    double margin = cp_margin({T, N, Vec::Zero(m)});
    N += std::max(0.0, slack - margin) * Mat::Identity(m, m);
    return {T, symmetrize(N), Vec::Zero(m)};
}

states::GaussianState apply(const GaussianChannel& c, const states::GaussianState& s) {
    if (c.T.cols() != s.x_bar.size()) fail("DimensionMismatch", "channel input dimension mismatch");
    return {c.T * s.x_bar + c.d, symmetrize(c.T * s.V * c.T.transpose() + c.N), s.ordering};
}

GaussianChannel compose(const GaussianChannel& c2, const GaussianChannel& c1) {
    if (c2.T.cols() != c1.T.rows()) fail("DimensionMismatch", "compose: inner dimensions differ");
    return {c2.T * c1.T, symmetrize(c2.T * c1.N * c2.T.transpose() + c2.N), c2.T * c1.d + c2.d};
}

GaussianChannel juxtapose(const GaussianChannel& c1, const GaussianChannel& c2) {
    Vec d(c1.d.size() + c2.d.size());
    d << c1.d, c2.d;
    return {direct_sum(c1.T, c2.T), direct_sum(c1.N, c2.N), d};
}

GaussianChannel from_dilation(const Mat& S, int n_a, const Mat& V_b) {
    const int n = modes_of(S);
    if (n_a < 1 || n_a > n) fail("PartitionInvalid", "from_dilation: invalid system size");
    const int nb = n - n_a;
    if (V_b.rows() != 2 * nb || V_b.cols() != 2 * nb)
        fail("PartitionInvalid", "from_dilation: environment covariance has wrong size");
    Mat T = S.topLeftCorner(2 * n_a, 2 * n_a);
    if (nb == 0) return make_channel(T, Mat::Zero(2 * n_a, 2 * n_a));
    Mat Sab = S.topRightCorner(2 * n_a, 2 * nb);
    return make_channel(T, Sab * V_b * Sab.transpose());
}

DilationResult dilate(const GaussianChannel& c) {
    if (!is_square_even(c.T)) fail("DimensionMismatch", "dilate needs a square T");
    if (c.d.size() && c.d.cwiseAbs().maxCoeff() > 0.0)
        fail("InvalidParameter", "dilate expects a channel with d = 0 (displacements are local)");
    const int na = int(c.T.rows() / 2);
    const Eigen::Index da = 2 * na;
    const Mat Oa = omega_matrix(na);
    const Mat I = Mat::Identity(da, da);
    const Mat G = I - c.T;
    if (rel_det_abs(G) < 1e-12) fail("SingularIdMinusT", "det(Id - T) = 0");
    const Mat Ginv = G.inverse();

    DilationResult r;
    r.n_a = na;
    r.M = Oa * (0.5 * I - Ginv);
    r.M_s = symmetrize(r.M);
    r.M_a = 0.5 * (r.M - r.M.transpose());
    Mat K = 2.0 * Oa * r.M_a * Oa;
    SkewCanonical sc = skew_canonical(K, 1e-10);
    const Eigen::Index k = sc.lambda.size();
    Mat R0(da, 2 * k);
    for (Eigen::Index j = 0; j < k; ++j) {
        double s = std::sqrt(sc.lambda(j));
        R0.col(2 * j) = sc.K.col(2 * j) * s;
        R0.col(2 * j + 1) = sc.K.col(2 * j + 1) * s;
    }

    // Noise directions outside (Id - T) R need extra environment modes whose
    // p-column is zero: they leave R Ω_b Rᵗ untouched.
    const double scale = std::max(1.0, c.N.cwiseAbs().maxCoeff());
    Mat A = G * R0;
    Mat Pperp = I;
    if (k > 0) {
        Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU);
        Mat U = svd.matrixU();
        Pperp -= U * U.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(Pperp * c.N * Pperp));
    std::vector<Vec> extra;
    for (Eigen::Index i = 0; i < da; ++i)
        if (es.eigenvalues()(i) > 1e-10 * scale) extra.push_back(es.eigenvectors().col(i));
    const Eigen::Index e = Eigen::Index(extra.size());
    const Eigen::Index nb = k + e;
    r.n_b = int(nb);

    r.R = Mat::Zero(da, 2 * nb);
    r.R.leftCols(2 * k) = R0;
    Mat Aeff(da, 2 * k + e);
    Aeff.leftCols(2 * k) = A;
    for (Eigen::Index j = 0; j < e; ++j) {
        r.R.col(2 * (k + j)) = Ginv * extra[std::size_t(j)];
        Aeff.col(2 * k + j) = extra[std::size_t(j)];
    }
    Mat Veff(0, 0);
    double resid = c.N.cwiseAbs().maxCoeff();
    if (Aeff.cols() > 0) {
        Mat Ap = min_norm_pinv(Aeff);
        Veff = symmetrize(Ap * c.N * Ap.transpose());
        resid = (Aeff * Veff * Aeff.transpose() - c.N).cwiseAbs().maxCoeff();
    }
    if (resid > 1e-6 * scale)
        fail("NoPhysicalEnv", "noise matrix is not reachable from the environment (residual " +
                                  std::to_string(resid) + ")");

    Mat Vb = Mat::Zero(2 * nb, 2 * nb);
    std::vector<int> slot;  // position in Veff -> coordinate in V_b
    for (Eigen::Index j = 0; j < 2 * k; ++j) slot.push_back(int(j));
    for (Eigen::Index j = 0; j < e; ++j) slot.push_back(int(2 * (k + j)));
    for (std::size_t a = 0; a < slot.size(); ++a)
        for (std::size_t b = 0; b < slot.size(); ++b) Vb(slot[a], slot[b]) = Veff(a, b);

    if (nb > 0) {
        // free p-variances of the extra modes: grow until V_b + iΩ_b ⪰ 0
        double lam = 1.0;
        bool ok = false;
        for (int it = 0; it < 90; ++it) {
            for (Eigen::Index j = 0; j < e; ++j) Vb(2 * (k + j) + 1, 2 * (k + j) + 1) = lam;
            if (states::physicality_margin({Vec::Zero(2 * nb), Vb, ModeOrdering::Interleaved}) >=
                -1e-9 * std::max(1.0, Vb.cwiseAbs().maxCoeff())) {
                ok = true;
                break;
            }
            if (e == 0) break;
            lam *= 2.0;
        }
        if (!ok) fail("NoPhysicalEnv", "no physical environment covariance reproduces N");
    }
    r.env_cov = Vb;

    const Mat Ob = nb > 0 ? omega_matrix(int(nb)) : Mat(0, 0);
    r.L = nb > 0 ? Mat(-Ob * r.R.transpose() * Oa) : Mat(0, da);
    r.S_prime = Mat::Identity(2 * nb, 2 * nb) - r.L * G * r.R;
    r.S = Mat::Zero(da + 2 * nb, da + 2 * nb);
    r.S.topLeftCorner(da, da) = c.T;
    if (nb > 0) {
        r.S.topRightCorner(da, 2 * nb) = G * r.R;
        r.S.bottomLeftCorner(2 * nb, da) = r.L * G;
        r.S.bottomRightCorner(2 * nb, 2 * nb) = r.S_prime;
    }
    return r;
}

DilationChain dilate_chain(const GaussianChannel& c) {
    DilationChain chain;
    if (!is_square_even(c.T)) fail("DimensionMismatch", "dilate needs a square T");
    const int n = int(c.T.rows() / 2);
    const Mat I = Mat::Identity(2 * n, 2 * n);
    if (rel_det_abs(I - c.T) >= 1e-12) {
        chain.factors.push_back(c);
        chain.stages.push_back(dilate(c));
        return chain;
    }
    // c = outer ∘ inner, inner = 𝒢_{G,0} with G a per-mode rotation (G = -Id at φ = π)
    const double angles[] = {std::numbers::pi, std::numbers::pi / 2, std::numbers::pi / 3,
                             2 * std::numbers::pi / 3, std::numbers::pi / 5, 0.7, 1.9, 2.6};
    for (double phi : angles) {
        Mat G = Mat::Zero(2 * n, 2 * n);
        for (int j = 0; j < n; ++j) {
            G(2 * j, 2 * j) = G(2 * j + 1, 2 * j + 1) = std::cos(phi);
            G(2 * j, 2 * j + 1) = -std::sin(phi);
            G(2 * j + 1, 2 * j) = std::sin(phi);
        }
        Mat T1 = c.T * inverse(G);
        if (rel_det_abs(I - T1) < 1e-8) continue;
        GaussianChannel inner = unitary_channel(G);
        GaussianChannel outer = make_channel(T1, c.N);
        chain.factors = {inner, outer};
        chain.stages = {dilate(inner), dilate(outer)};
        return chain;
    }
    fail("SingularIdMinusT", "could not factor the channel away from det(Id - T) = 0");
}

std::array<double, 3> dilation_block_residuals(const DilationResult& r) {
    const int na = r.n_a, nb = r.n_b;
    const Mat Oa = omega_matrix(na);
    const Mat T = r.S.topLeftCorner(2 * na, 2 * na);
    const Mat G = Mat::Identity(2 * na, 2 * na) - T;
    if (nb == 0) return {(T * Oa * T.transpose() - Oa).cwiseAbs().maxCoeff(), 0.0, 0.0};
    const Mat Ob = omega_matrix(nb);
    double first = (T * Oa * T.transpose() + G * r.R * Ob * r.R.transpose() * G.transpose() - Oa)
                       .cwiseAbs()
                       .maxCoeff();
    double second = (T * Oa * (r.L * G).transpose() + G * r.R * Ob * r.S_prime.transpose())
                        .cwiseAbs()
                        .maxCoeff();
    double third = (r.S_prime * Ob * r.S_prime.transpose() +
                    r.L * G * Oa * G.transpose() * r.L.transpose() - Ob)
                       .cwiseAbs()
                       .maxCoeff();
    return {first, second, third};
}

CayleyDilation dilation_cayley_form(const DilationResult& r, const Mat& S_b, const Mat& S_bp) {
    const int na = r.n_a, nb = r.n_b;
    const Eigen::Index da = 2 * na, db = 2 * nb;
    if (S_b.rows() != db || S_b.cols() != db || S_bp.rows() != db || S_bp.cols() != db)
        fail("DimensionMismatch", "local environment transformations have wrong size");
    const Mat Ia = Mat::Identity(da, da), Ib = Mat::Identity(db, db);
    const Mat T = r.S.topLeftCorner(da, da);
    if (rel_det_abs(Ia - T) < 1e-12) fail("SingularIdMinusT", "det(Id - S) = 0");
    Eigen::PartialPivLU<Mat> ylu(Ib - S_b * S_bp);
    if (db > 0 && !(ylu.rcond() > 1e-12))
        fail("SingularLocalProduct", "det(Id - S_b S_b') = 0");
    const Mat Yinv = db > 0 ? Mat(ylu.inverse()) : Mat(0, 0);
    const Mat Oa = omega_matrix(na);

    CayleyDilation out;
    const Mat base = Oa * r.M + 0.5 * Ia;  // (Id - T)^{-1}
    out.A = base + r.R * S_bp * Yinv * S_b * r.L;
    out.B = r.R * S_bp * Yinv;
    out.C = Yinv * S_b * r.L;
    out.Dblk = Yinv;
    Mat big(da + db, da + db);
    big << out.A, out.B, out.C, out.Dblk;
    const Mat I = Mat::Identity(da + db, da + db);
    out.D = I - big.inverse();
    out.M_tilde = -omega_matrix(na + nb) * (big - 0.5 * I);
    const Mat Sbp_inv = db > 0 ? Mat(inverse(S_bp)) : Mat(0, 0);
    out.env_cov = db > 0 ? Mat(symmetrize(Sbp_inv * r.env_cov * Sbp_inv.transpose())) : Mat(0, 0);
    return out;
}

}  // namespace sympl::channels
