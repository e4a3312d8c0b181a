#include "sympl/core.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace sympl {

const char* to_string(ModeOrdering o) {
    return o == ModeOrdering::Interleaved ? "interleaved" : "grouped";
}

ModeOrdering ordering_from_string(const std::string& s) {
    if (s == "interleaved") return ModeOrdering::Interleaved;
    if (s == "grouped") return ModeOrdering::Grouped;
    fail("InvalidOrdering", "unknown ordering '" + s + "'");
}

Mat omega_matrix(int n, ModeOrdering ordering) {
    if (n < 1) fail("DimensionMismatch", "n_modes must be >= 1");
    Mat O = Mat::Zero(2 * n, 2 * n);
    if (ordering == ModeOrdering::Interleaved) {
        for (int j = 0; j < n; ++j) {
            O(2 * j, 2 * j + 1) = -1.0;
            O(2 * j + 1, 2 * j) = 1.0;
        }
    } else {
        for (int j = 0; j < n; ++j) {
            O(j, n + j) = -1.0;
            O(n + j, j) = 1.0;
        }
    }
    return O;
}

SymplecticForm omega(int n, ModeOrdering ordering) {
    return {n, ordering, omega_matrix(n, ordering)};
}

Mat ordering_permutation(int n) {
    Mat P = Mat::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        P(2 * j, j) = 1.0;
        P(2 * j + 1, n + j) = 1.0;
    }
    return P;
}

Mat to_grouped(const Mat& S) {
    Mat P = ordering_permutation(modes_of(S));
    return P.transpose() * S * P;
}

Mat to_interleaved(const Mat& S) {
    Mat P = ordering_permutation(modes_of(S));
    return P * S * P.transpose();
}

Vec to_grouped_vec(const Vec& x) {
    if (x.size() % 2) fail("DimensionMismatch", "odd-length phase-space vector");
    return ordering_permutation(int(x.size() / 2)).transpose() * x;
}

Vec to_interleaved_vec(const Vec& x) {
    if (x.size() % 2) fail("DimensionMismatch", "odd-length phase-space vector");
    return ordering_permutation(int(x.size() / 2)) * x;
}

int modes_of(const Mat& S) {
    if (S.rows() != S.cols() || S.rows() % 2 != 0 || S.rows() == 0)
        fail("DimensionMismatch", "expected a square matrix of even dimension, got " +
                                      std::to_string(S.rows()) + "x" + std::to_string(S.cols()));
    return int(S.rows() / 2);
}

double symplectic_residual(const Mat& S, ModeOrdering ordering) {
    Mat O = omega_matrix(modes_of(S), ordering);
    return (S.transpose() * O * S - O).cwiseAbs().maxCoeff();
}

bool is_symplectic(const Mat& S, double tol, ModeOrdering ordering) {
    return symplectic_residual(S, ordering) <= tol;
}

bool is_sp_algebra(const Mat& M, double tol, ModeOrdering ordering) {
    Mat O = omega_matrix(modes_of(M), ordering);
    return (M * O + O * M.transpose()).cwiseAbs().maxCoeff() <= tol;
}

Mat direct_sum(const Mat& A, const Mat& B) {
    Mat C = Mat::Zero(A.rows() + B.rows(), A.cols() + B.cols());
    C.topLeftCorner(A.rows(), A.cols()) = A;
    C.bottomRightCorner(B.rows(), B.cols()) = B;
    return C;
}

Mat symmetrize(const Mat& A) { return 0.5 * (A + A.transpose()); }

Mat exp_map(const Mat& H, double t, double tol) {
    int n = modes_of(H);
    double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if ((H - H.transpose()).cwiseAbs().maxCoeff() > tol * scale)
        fail("NotSymmetric", "exp_map requires a symmetric H");
    Mat A = omega_matrix(n) * symmetrize(H) * t;
    // spectral norm bound of the generator
    double norm = Eigen::JacobiSVD<Mat>(A).singularValues()(0);
    if (norm > 50.0) fail("RangeError", "||Omega H t|| = " + std::to_string(norm) + " exceeds 50");
    return A.exp();
}

Mat cayley(const Mat& M) {
    int n = modes_of(M);
    Mat shifted = M + 0.5 * Mat::Identity(2 * n, 2 * n);
    Eigen::PartialPivLU<Mat> lu(shifted);
    if (!(lu.rcond() > 1e-14)) fail("SingularShift", "M + Id/2 is singular");
    return Mat::Identity(2 * n, 2 * n) - lu.inverse();
}

Mat cayley_generator(const Mat& S) {
    int n = modes_of(S);
    Mat I = Mat::Identity(2 * n, 2 * n);
    Eigen::PartialPivLU<Mat> lu(I - S);
    if (!(lu.rcond() > 1e-14)) fail("SingularIdMinusS", "Id - S is singular");
    return lu.inverse() - 0.5 * I;
}

Mat inverse(const Mat& S, ModeOrdering ordering) {
    Mat O = omega_matrix(modes_of(S), ordering);
    return -O * S.transpose() * O;
}

EulerDecomposition euler_decompose(const Mat& S) {
    int n = modes_of(S);
    Mat O = omega_matrix(n);
    Mat A = symmetrize(S * S.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(A);
    // symplectic Gram-Schmidt over eigenvectors, largest eigenvalue first
    Mat K = Mat::Zero(2 * n, 2 * n);
    int found = 0;
    for (int i = 2 * n - 1; i >= 0 && found < n; --i) {
        Vec v = es.eigenvectors().col(i);
        if (found > 0) {
            auto Kf = K.leftCols(2 * found);
            v -= Kf * (Kf.transpose() * v);
            v -= Kf * (Kf.transpose() * v);
        }
        double nv = v.norm();
        if (nv < 0.5) continue;
        v /= nv;
        K.col(2 * found) = v;
        K.col(2 * found + 1) = O * v;
        ++found;
    }
    if (found < n) fail("NotSymplectic", "euler_decompose: could not build a symplectic eigenbasis");
    EulerDecomposition out;
    out.squeeze.resize(n);
    out.Z = Mat::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        double z2 = K.col(2 * j).dot(A * K.col(2 * j));
        double z = std::sqrt(std::max(z2, 1.0));
        out.squeeze(j) = z;
        out.Z(2 * j, 2 * j) = z;
        out.Z(2 * j + 1, 2 * j + 1) = 1.0 / z;
    }
    out.R = K;
    Mat Zinv = out.Z.diagonal().cwiseInverse().asDiagonal();
    out.Rp = Zinv * K.transpose() * S;
    return out;
}

PreIwasawa pre_iwasawa(const Mat& S) {
    int n = modes_of(S);
    Mat A = S.topLeftCorner(n, n), B = S.topRightCorner(n, n);
    Mat C = S.bottomLeftCorner(n, n), D = S.bottomRightCorner(n, n);
    Mat G = symmetrize(A * A.transpose() + B * B.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(G);
    PreIwasawa r;
    r.L = es.operatorSqrt();
    Mat Linv = es.operatorInverseSqrt();
    r.V = Linv * A;  // L symmetric, so L^{-t} = L^{-1}
    r.W = Linv * B;
    r.P = symmetrize((C * A.transpose() + D * B.transpose()) * G.inverse());
    Mat I = Mat::Identity(n, n), Z = Mat::Zero(n, n);
    r.lower.resize(2 * n, 2 * n);
    r.lower << I, Z, r.P, I;
    r.scale.resize(2 * n, 2 * n);
    r.scale << r.L.transpose(), Z, Z, Linv;
    r.ortho.resize(2 * n, 2 * n);
    r.ortho << r.V, r.W, -r.W, r.V;
    return r;
}

SkewCanonical skew_canonical(const Mat& A, double rel_tol) {
    const int n = int(A.rows());
    if (A.cols() != n) fail("DimensionMismatch", "skew_canonical needs a square matrix");
    SkewCanonical out;
    if (n == 0) {
        out.K = Mat(0, 0);
        out.lambda = Vec(0);
        return out;
    }
    Mat As = 0.5 * (A - A.transpose());
    double scale = std::max(As.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::RealSchur<Mat> schur(As);
    const Mat& T = schur.matrixT();
    const Mat& U = schur.matrixU();

    struct Pair { double lam; Vec v, w; int order; };
    std::vector<Pair> pairs;
    std::vector<Vec> kernel;
    for (int i = 0; i < n;) {
        if (i + 1 < n && T(i + 1, i) != 0.0) {
            double b = T(i, i + 1), c = T(i + 1, i);
            double lam = 0.5 * (std::abs(b) + std::abs(c));
            if (lam <= rel_tol * scale) {
                kernel.push_back(U.col(i));
                kernel.push_back(U.col(i + 1));
            } else if (c > 0) {
                pairs.push_back({lam, U.col(i), U.col(i + 1), i});
            } else {
                pairs.push_back({lam, U.col(i + 1), U.col(i), i});
            }
            i += 2;
        } else {
            kernel.push_back(U.col(i));
            i += 1;
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const Pair& a, const Pair& b) { return a.lam > b.lam; });
    out.K.resize(n, n);
    out.lambda.resize(Eigen::Index(pairs.size()));
    int col = 0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        out.K.col(col++) = pairs[k].v;
        out.K.col(col++) = pairs[k].w;
        out.lambda(Eigen::Index(k)) = pairs[k].lam;
    }
    for (const auto& v : kernel) out.K.col(col++) = v;
    return out;
}

WilliamsonResult williamson(const Mat& V) {
    int n = modes_of(V);
    double scale = std::max(1.0, V.cwiseAbs().maxCoeff());
    if ((V - V.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        fail("NotSymmetric", "williamson requires a symmetric matrix");
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(V));
    if (!(es.eigenvalues().minCoeff() > 0.0))
        fail("NotPositiveDefinite", "williamson requires a positive-definite matrix");
    Mat Vmh = es.operatorInverseSqrt();
    Mat A = Vmh * omega_matrix(n) * Vmh;
    SkewCanonical sc = skew_canonical(A, 0.0);
    if (sc.lambda.size() != n) fail("NotPositiveDefinite", "degenerate symplectic spectrum");
    WilliamsonResult r;
    r.nu = sc.lambda.cwiseInverse();  // λ descending => ν ascending
    Vec d(2 * n);
    for (int j = 0; j < n; ++j) d(2 * j) = d(2 * j + 1) = std::sqrt(r.nu(j));
    r.S = d.asDiagonal() * sc.K.transpose() * Vmh;
    return r;
}

Vec symplectic_eigenvalues(const Mat& V) { return williamson(V).nu; }

namespace {

// Orthonormal basis of {x : Bᵗ Ω x = 0}.
Mat sigma_complement(const Mat& B, const Mat& O) {
    const Eigen::Index dim = O.rows();
    if (B.cols() == 0) return Mat::Identity(dim, dim);
    Mat Ct = (O.transpose() * B).transpose();  // rows: (Ωᵗ b)ᵗ, x ⟂ those rows <=> bᵗΩx = 0
    Eigen::JacobiSVD<Mat> svd(Ct, Eigen::ComputeFullV);
    double tol = 1e-10 * std::max(1.0, svd.singularValues().size() ? svd.singularValues()(0) : 1.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol) ++rank;
    return svd.matrixV().rightCols(dim - rank);
}

}  // namespace

Mat symplectic_completion(const Mat& E, const Mat& F, const Mat& C) {
    const Eigen::Index dim = std::max({E.rows(), F.rows(), C.rows()});
    if (dim % 2) fail("DimensionMismatch", "symplectic_completion: odd ambient dimension");
    const int m = int(dim / 2);
    const Mat O = omega_matrix(m);
    const Eigen::Index k = E.cols(), r = C.cols();
    if (F.cols() != k) fail("DimensionMismatch", "symplectic_completion: E and F differ in size");
    if (2 * k + 2 * r > dim) fail("DimensionMismatch", "symplectic_completion: too many vectors");

    // conjugates d_i: σ(pairs, d) = 0, σ(c_k, d_i) = -δ
    Mat D(dim, r);
    if (r > 0) {
        Mat Rows(2 * k + r, dim);
        Vec rhs = Vec::Zero(2 * k + r);
        for (Eigen::Index i = 0; i < k; ++i) {
            Rows.row(2 * i) = E.col(i).transpose() * O;
            Rows.row(2 * i + 1) = F.col(i).transpose() * O;
        }
        for (Eigen::Index i = 0; i < r; ++i) Rows.row(2 * k + i) = C.col(i).transpose() * O;
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(Rows);
        for (Eigen::Index i = 0; i < r; ++i) {
            rhs.setZero();
            rhs(2 * k + i) = -1.0;
            D.col(i) = cod.solve(rhs);
        }
        Mat Sd = D.transpose() * O * D;
        D += C * (-0.5 * Sd);
    }

    Mat B(dim, dim);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < k; ++i) {
        B.col(col++) = E.col(i);
        B.col(col++) = F.col(i);
    }
    for (Eigen::Index i = 0; i < r; ++i) {
        B.col(col++) = C.col(i);
        B.col(col++) = D.col(i);
    }
    if (col < dim) {
        Mat W = sigma_complement(B.leftCols(col), O);
        SkewCanonical sc = skew_canonical(W.transpose() * O * W);
        if (2 * sc.lambda.size() != dim - col)
            fail("RankDeficient", "symplectic_completion: complement is not symplectic");
        for (Eigen::Index i = 0; i < sc.lambda.size(); ++i) {
            double s = 1.0 / std::sqrt(sc.lambda(i));
            B.col(col++) = W * sc.K.col(2 * i) * s;
            B.col(col++) = W * sc.K.col(2 * i + 1) * s;
        }
    }
    return B;
}

SymplecticSVD symplectic_svd(const Mat& M) {
    if (M.rows() % 2) fail("DimensionMismatch", "symplectic_svd needs an even number of rows");
    const int m = int(M.rows() / 2);
    const Eigen::Index n = M.cols();
    const Mat O = omega_matrix(m);
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeThinU);
    const Vec& sv = svd.singularValues();
    if (n == 0 || n > M.rows() || sv(n - 1) <= 1e-12 * sv(0))
        fail("RankDeficient", "symplectic_svd requires full column rank");
    Mat B = svd.matrixU();  // orthonormal basis of col(M)

    SkewCanonical sc = skew_canonical(B.transpose() * O * B, 1e-10);
    const Eigen::Index k = sc.lambda.size(), r = n - 2 * k;
    if (k + r > m) fail("RankDeficient", "symplectic_svd: isotropic part too large");
    Mat X(2 * m, n);
    for (Eigen::Index i = 0; i < k; ++i) {
        double s = 1.0 / std::sqrt(sc.lambda(i));
        X.col(2 * i) = B * sc.K.col(2 * i) * s;
        X.col(2 * i + 1) = B * sc.K.col(2 * i + 1) * s;
    }
    for (Eigen::Index i = 0; i < r; ++i) X.col(2 * k + i) = B * sc.K.col(2 * k + i);

    Mat Y = X.colPivHouseholderQr().solve(M);  // exact: col(M) = col(X)
    Mat H = Y * Y.transpose();
    Mat T1 = Mat::Identity(n, n);  // coordinate change Y' = T1 Y, basis X' = X T1^{-1}
    if (k > 0 && r > 0) {
        Mat Cc = -H.bottomLeftCorner(r, 2 * k) * H.topLeftCorner(2 * k, 2 * k).inverse();
        T1.bottomLeftCorner(r, 2 * k) = Cc;
    }
    Mat Y1 = T1 * Y;
    Mat X1 = X * T1.inverse();

    Mat T2 = Mat::Identity(n, n);
    if (k > 0) {
        Mat H11 = symmetrize(Y1.topRows(2 * k) * Y1.topRows(2 * k).transpose());
        T2.topLeftCorner(2 * k, 2 * k) = williamson(H11).S;
    }
    if (r > 0) {
        Mat H22 = symmetrize(Y1.bottomRows(r) * Y1.bottomRows(r).transpose());
        Eigen::SelfAdjointEigenSolver<Mat> es(H22);
        T2.bottomRightCorner(r, r) = es.eigenvectors().transpose();
    }
    Mat Y2 = T2 * Y1;
    Mat X2 = X1 * T2.inverse();

    SymplecticSVD out;
    out.lambda = Y2.rowwise().norm();
    out.Q = out.lambda.cwiseInverse().asDiagonal() * Y2;
    Mat E(2 * m, k), F(2 * m, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        E.col(i) = X2.col(2 * i);
        F.col(i) = X2.col(2 * i + 1);
    }
    out.S = symplectic_completion(E, F, X2.rightCols(r));
    // pairs occupy modes 0..k-1, isotropic directions the q-quadrature of modes k..k+r-1
    out.embed = Mat::Zero(2 * m, n);
    for (Eigen::Index i = 0; i < 2 * k; ++i) out.embed(i, i) = 1.0;
    for (Eigen::Index i = 0; i < r; ++i) out.embed(2 * (k + i), 2 * k + i) = 1.0;
    return out;
}

namespace {

Mat haar_orthosymplectic(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    CMat Zc(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Zc(i, j) = std::complex<double>(g(rng), g(rng));
    Eigen::HouseholderQR<CMat> qr(Zc);
    CMat Q = qr.householderQ();
    CMat R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        std::complex<double> d = R(j, j);
        double a = std::abs(d);
        Q.col(j) *= (a > 0 ? d / a : std::complex<double>(1.0, 0.0));
    }
    Mat X = Q.real(), Y = Q.imag();
    Mat G(2 * n, 2 * n);
    G << X, -Y, Y, X;
    return to_interleaved(G);
}

}  // namespace

Mat random_orthosymplectic(int n, std::uint64_t seed) {
    if (n < 1) fail("DimensionMismatch", "n_modes must be >= 1");
    std::mt19937_64 rng(seed);
    return haar_orthosymplectic(n, rng);
}

Mat random_symplectic(int n, std::uint64_t seed, double squeeze_bound) {
    if (n < 1) fail("DimensionMismatch", "n_modes must be >= 1");
    if (!(squeeze_bound >= 1.0)) fail("InvalidParameter", "squeeze_bound must be >= 1");
    std::mt19937_64 rng(seed);
    Mat R = haar_orthosymplectic(n, rng);
    double lb = std::log(squeeze_bound);
    std::uniform_real_distribution<double> u(-lb, lb);
    Vec d(2 * n);
    for (int j = 0; j < n; ++j) {
        double z = lb > 0 ? std::exp(u(rng)) : 1.0;
        d(2 * j) = z;
        d(2 * j + 1) = 1.0 / z;
    }
    Mat Rp = haar_orthosymplectic(n, rng);
    return R * d.asDiagonal() * Rp;
}

SubspaceKind classify_subspace(const Mat& F, double tol) {
    if (F.rows() % 2) fail("DimensionMismatch", "subspace basis must live in an even-dimensional space");
    const int n = int(F.rows() / 2);
    const Eigen::Index m = F.cols();
    if (m == 0) return SubspaceKind::Isotropic;
    Eigen::JacobiSVD<Mat> svd(F);
    const Vec& s = svd.singularValues();
    if (s(m - 1) <= tol * std::max(1.0, s(0))) return SubspaceKind::General;
    Mat G = F.transpose() * omega_matrix(n) * F;
    double scale = std::max(1.0, F.cwiseAbs().maxCoeff() * F.cwiseAbs().maxCoeff());
    if (G.cwiseAbs().maxCoeff() <= tol * scale)
        return m == n ? SubspaceKind::Lagrangian : SubspaceKind::Isotropic;
    if (m % 2 == 0) {
        Eigen::JacobiSVD<Mat> gs(G);
        if (gs.singularValues()(m - 1) > tol * scale) return SubspaceKind::Symplectic;
    }
    return SubspaceKind::General;
}

SubspaceBasis make_subspace(const Mat& F, double tol) { return {F, classify_subspace(F, tol)}; }

SubspaceBasis coordinate_subspace(int n, const std::vector<int>& coords) {
    Mat F = Mat::Zero(2 * n, Eigen::Index(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (coords[i] < 0 || coords[i] >= 2 * n)
            fail("DimensionMismatch", "coordinate index out of range");
        F(coords[i], Eigen::Index(i)) = 1.0;
    }
    return make_subspace(F);
}

SubspaceBasis mode_subspace(int n, const std::vector<int>& modes) {
    std::vector<int> coords;
    for (int j : modes) {
        coords.push_back(2 * j);
        coords.push_back(2 * j + 1);
    }
    return coordinate_subspace(n, coords);
}

SubspaceBasis conjugate_plane(const SubspaceBasis& l) {
    const int n = int(l.F.rows() / 2);
    return make_subspace(omega_matrix(n) * l.F);
}

Mat submatrix(const Mat& S, const SubspaceBasis& rows, const SubspaceBasis& cols) {
    if (rows.F.rows() != S.rows() || cols.F.rows() != S.cols())
        fail("DimensionMismatch", "submatrix: basis dimension does not match S");
    return rows.F.transpose() * S * cols.F;
}

}  // namespace sympl
