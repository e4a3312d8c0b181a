#include "sympl/transduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "sympl/states.hpp"

namespace sympl::transduction {

using channels::GaussianChannel;

namespace {

Mat mode_coords(int n, const std::vector<int>& modes) { return mode_subspace(n, modes).F; }

Mat q_plane(int m) {
    Mat F = Mat::Zero(2 * m, m);
    for (int j = 0; j < m; ++j) F(2 * j, j) = 1.0;
    return F;
}

void check_cover(int n, const std::vector<int>& a, const std::vector<int>& b, const char* what) {
    std::vector<int> all = a;
    all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    bool ok = int(all.size()) == n;
    for (int j = 0; ok && j < n; ++j) ok = all[j] == j;
    if (!ok) fail("PartitionInvalid", std::string(what) + " must partition the modes");
}

double cond(const Mat& A) {
    Eigen::JacobiSVD<Mat> svd(A);
    const Vec& s = svd.singularValues();
    if (s.size() == 0) return 1.0;
    double lo = s(s.size() - 1);
    return lo > 0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

}  // namespace

PartitionSpec default_partition(int n) {
    if (n < 2) fail("PartitionInvalid", "need at least two modes");
    PartitionSpec p;
    p.n_modes = n;
    p.in_modes = p.out_modes = {0};
    for (int j = 1; j < n; ++j) {
        p.anc_modes.push_back(j);
        p.idl_modes.push_back(j);
    }
    p.l_z = q_plane(n - 1);
    p.l_h = q_plane(n - 1);
    return p;
}

void validate(const PartitionSpec& p) {
    check_cover(p.n_modes, p.in_modes, p.anc_modes, "in/anc");
    check_cover(p.n_modes, p.out_modes, p.idl_modes, "out/idl");
    if (p.in_modes.size() != p.out_modes.size())
        fail("PartitionInvalid", "in and out blocks must have the same size");
    const Eigen::Index na = Eigen::Index(p.anc_modes.size()), ni = Eigen::Index(p.idl_modes.size());
    if (p.l_z.rows() != 2 * na || p.l_z.cols() != na || p.l_h.rows() != 2 * ni || p.l_h.cols() != ni)
        fail("PartitionInvalid", "planes must be Lagrangian in their blocks");
    if (na > 0 && classify_subspace(p.l_z) != SubspaceKind::Lagrangian)
        fail("NotLagrangian", "l_z is not Lagrangian");
    if (ni > 0 && classify_subspace(p.l_h) != SubspaceKind::Lagrangian)
        fail("NotLagrangian", "l_h is not Lagrangian");
}

PartitionBases bases(const PartitionSpec& p) {
    validate(p);
    const int n = p.n_modes;
    PartitionBases b;
    b.in = make_subspace(mode_coords(n, p.in_modes));
    b.out = make_subspace(mode_coords(n, p.out_modes));
    b.anc = make_subspace(mode_coords(n, p.anc_modes));
    b.idl = make_subspace(mode_coords(n, p.idl_modes));
    const int na = int(p.anc_modes.size()), ni = int(p.idl_modes.size());
    Mat lz = b.anc.F * p.l_z.householderQr().householderQ() * Mat::Identity(2 * na, na);
    Mat lh = b.idl.F * p.l_h.householderQr().householderQ() * Mat::Identity(2 * ni, ni);
    b.z = make_subspace(lz);
    b.h = make_subspace(lh);
    b.zp = conjugate_plane(b.z);
    b.hp = conjugate_plane(b.h);
    return b;
}

TeleportResult teleport_transform(const Mat& S, const PartitionSpec& p) {
    if (modes_of(S) != p.n_modes) fail("DimensionMismatch", "S does not match the partition");
    const PartitionBases b = bases(p);
    const Mat Si = inverse(S);
    auto sub = [](const Mat& A, const SubspaceBasis& r, const SubspaceBasis& c) {
        return submatrix(A, r, c);
    };

    TeleportResult t;
    const Mat Shzp = sub(S, b.h, b.zp);
    t.condition = cond(Shzp);
    if (!(t.condition < 1e12)) fail("SingularFeedforward", "S_{h,z'} is not invertible");
    const Mat Sizhp = sub(Si, b.z, b.hp);
    if (!(cond(Sizhp) < 1e12)) fail("SingularFeedforward", "(S^{-1})_{z,h'} is not invertible");
    Eigen::PartialPivLU<Mat> lu(Shzp), lui(Sizhp);

    t.S_tilde = sub(S, b.out, b.in) - sub(S, b.out, b.zp) * lu.solve(sub(S, b.h, b.in));
    t.S_check = sub(Si, b.in, b.out) - sub(Si, b.in, b.hp) * lui.solve(sub(Si, b.z, b.out));
    t.F = -sub(S, b.out, b.zp) * lu.inverse();
    t.B = -sub(Si, b.in, b.hp) * lui.inverse();
    t.F_identity_rhs =
        t.S_tilde * (sub(Si, b.in, b.h) - sub(Si, b.in, b.hp) * lui.solve(sub(Si, b.z, b.h)));
    t.B_identity_rhs = t.S_tilde.partialPivLu().solve(
        sub(S, b.out, b.z) - sub(S, b.out, b.zp) * lu.solve(sub(S, b.h, b.z)));
    return t;
}

double TeleportResiduals::max() const {
    return std::max({symplectic_tilde, symplectic_check, inverse, F_identity, B_identity});
}

TeleportResiduals teleport_residuals(const Mat& S, const PartitionSpec& p) {
    TeleportResult t = teleport_transform(S, p);
    TeleportResiduals r;
    r.symplectic_tilde = symplectic_residual(t.S_tilde);
    r.symplectic_check = symplectic_residual(t.S_check);
    r.inverse = (t.S_check * t.S_tilde - Mat::Identity(t.S_tilde.rows(), t.S_tilde.cols()))
                    .cwiseAbs()
                    .maxCoeff();
    r.F_identity = (t.F - t.F_identity_rhs).cwiseAbs().maxCoeff();
    r.B_identity = (t.B - t.B_identity_rhs).cwiseAbs().maxCoeff();
    return r;
}

Imperfections from_raw(double xi, double n_z, double tau, double n_h) {
    if (!(n_z >= 0.0 && n_h >= 0.0)) fail("NegativeOccupation", "thermal occupations must be >= 0");
    if (!(tau >= 0.0 && tau < 1.0)) fail("InvalidParameter", "tau must lie in [0,1)");
    Imperfections c;
    c.nu = std::exp(-2.0 * xi) * (2.0 * n_z + 1.0);
    c.mu = tau / (1.0 - tau) * (2.0 * n_h + 1.0);
    c.xi = xi;
    c.n_z = n_z;
    c.tau = tau;
    c.n_h = n_h;
    return c;
}

RawImperfections resolve_raw(const Imperfections& c) {
    if (!(c.nu >= 0.0 && c.mu >= 0.0)) fail("InvalidParameter", "nu and mu must be >= 0");
    RawImperfections r;
    r.n_z = c.n_z.value_or(0.0);
    r.n_h = c.n_h.value_or(0.0);
    r.xi = c.xi ? *c.xi
                : (c.nu > 0 ? -0.5 * std::log(c.nu / (2.0 * r.n_z + 1.0))
                            : std::numeric_limits<double>::infinity());
    r.tau = c.tau ? *c.tau : [&] {
        double m = c.mu / (2.0 * r.n_h + 1.0);
        return m / (1.0 + m);
    }();
    return r;
}

GaussianChannel adaptive_channel(const Mat& S, const PartitionSpec& p, const Imperfections& c) {
    if (!(c.nu >= 0.0 && c.mu >= 0.0)) fail("InvalidParameter", "nu and mu must be >= 0");
    TeleportResult t = teleport_transform(S, p);
    const Mat Stinv = inverse(t.S_tilde);
    const Mat G = Stinv * t.F;
    Mat N = c.nu * t.B * t.B.transpose() + c.mu * G * G.transpose();
    const Eigen::Index d = t.S_tilde.rows();
    return channels::make_channel(Mat::Identity(d, d), symmetrize(N));
}

Mat feedforward_matrix(const Mat& F) {
    const Eigen::Index dout = F.rows(), m = F.cols();
    if (dout % 2) fail("DimensionMismatch", "feedforward rows must be even");
    const Mat Oo = omega_matrix(int(dout / 2));
    const Mat X = -F.transpose() * Oo;
    const Mat Y = 0.5 * F.transpose() * Oo * F;
    Mat A = Mat::Identity(dout + 2 * m, dout + 2 * m);
    A.block(0, dout, dout, m) = F;
    A.block(dout + m, 0, m, dout) = -X;
    A.block(dout + m, dout, m, m) = Y;
    return A;
}

GaussianChannel simulate_adaptive(const Mat& S, const PartitionSpec& p, const Imperfections& c) {
    const TeleportResult t = teleport_transform(S, p);
    const PartitionBases b = bases(p);
    const RawImperfections raw = resolve_raw(c);
    const int n = p.n_modes;
    const int ni = int(p.idl_modes.size());
    const int ntot = n + ni;  // idler partners of H̃ appended
    const Eigen::Index D = 2 * ntot;
    if (!(raw.tau < 1.0)) fail("InvalidParameter", "tau must be < 1");

    // ancilla covariance: ν along l_z, e^{2ξ}(2n_z+1) along l_z'
    const double vz = c.nu;
    const double vzp = std::isfinite(raw.xi) ? std::exp(2.0 * raw.xi) * (2.0 * raw.n_z + 1.0) : 1.0;
    Mat Vanc = vz * b.z.F * b.z.F.transpose() + vzp * b.zp.F * b.zp.F.transpose();

    // S ⊕ Id
    Mat Sbig = Mat::Identity(D, D);
    Sbig.topLeftCorner(2 * n, 2 * n) = S;
    // Id ⊕ H̃: each idler mode mixed with its partner through H(τ)
    Mat Hbig = Mat::Identity(D, D);
    const Mat H = states::beamsplitter_h(raw.tau, 1);
    for (int j = 0; j < ni; ++j) {
        int a = 2 * p.idl_modes[std::size_t(j)], e = 2 * (n + j);
        int idx[4] = {a, a + 1, e, e + 1};
        for (int r = 0; r < 4; ++r)
            for (int q = 0; q < 4; ++q) Hbig(idx[r], idx[q]) = H(r, q);
    }
    // A_F ⊕ Id acting on (out, h, h') through the plane bases
    const Mat Fstar = t.F / std::sqrt(1.0 - raw.tau);
    const Mat AF = feedforward_matrix(Fstar);
    const Eigen::Index dout = 2 * Eigen::Index(p.out_modes.size());
    Mat Bcoords(2 * n, dout + 2 * ni);  // columns: out coords, h, h'
    Bcoords << b.out.F, b.h.F, b.hp.F;
    Mat Abig = Mat::Identity(D, D);
    Abig.topLeftCorner(2 * n, 2 * n) = Bcoords * AF * Bcoords.transpose();
    const Mat pipeline = Abig * Hbig * Sbig;

    // environment of H̃: thermal n_h; ancilla: Vanc; signal probes
    Mat V0 = Mat::Zero(D, D);
    V0.topLeftCorner(2 * n, 2 * n) = Vanc;
    for (int j = 0; j < ni; ++j) {
        int e = 2 * (n + j);
        V0(e, e) = V0(e + 1, e + 1) = 2.0 * raw.n_h + 1.0;
    }

    const Mat Pin = b.in.F, Pout = b.out.F;
    const Eigen::Index din = Pin.cols();
    const Mat Stinv = inverse(t.S_tilde);
    auto out_mean = [&](const Vec& xin) {
        Vec x = Vec::Zero(D);
        x.head(2 * n) = Pin * xin;
        Vec y = pipeline * x;
        return Vec(Stinv * Pout.transpose() * y.head(2 * n));
    };
    Vec d0 = out_mean(Vec::Zero(din));
    Mat T(din, din);
    for (Eigen::Index k = 0; k < din; ++k) T.col(k) = out_mean(Vec::Unit(din, k)) - d0;

    // vacuum signal probe for the noise
    Mat V = V0;
    V.topLeftCorner(2 * n, 2 * n) += Pin * Pin.transpose();
    Mat Vout = pipeline * V * pipeline.transpose();
    Mat Vsig = Stinv * Pout.transpose() * Vout.topLeftCorner(2 * n, 2 * n) * Pout * Stinv.transpose();
    Mat N = symmetrize(Vsig - T * T.transpose());
    return channels::make_channel(T, N, d0);
}

GaussianChannel direct_channel(const Mat& S, const PartitionSpec& p) {
    if (modes_of(S) != p.n_modes) fail("DimensionMismatch", "S does not match the partition");
    const PartitionBases b = bases(p);
    Mat T = submatrix(S, b.out, b.in);
    Mat Soa = submatrix(S, b.out, b.anc);
    return channels::make_channel(T, symmetrize(Soa * Soa.transpose()));
}

GaussianChannel direct_channel(const Mat& S, const PartitionSpec& p, const Mat& N_post) {
    GaussianChannel c = direct_channel(S, p);
    Eigen::FullPivLU<Mat> lu(c.T);
    if (!lu.isInvertible()) fail("SingularTransmission", "T is singular; post-processing undefined");
    Mat Ti = lu.inverse();
    GaussianChannel post = channels::make_channel(Ti, N_post);
    if (!channels::is_cp(post, 1e-9)) fail("NotCompletelyPositive", "post-processing channel is not CP");
    GaussianChannel r = channels::compose(post, c);
    r.T = Mat::Identity(c.T.rows(), c.T.cols());
    return r;
}

Mat optimal_post_noise(const GaussianChannel& direct) {
    if (direct.T.rows() != 2 || direct.T.cols() != 2)
        fail("Multimode", "post-processing optimization is single-mode");
    Eigen::FullPivLU<Mat> lu(direct.T);
    if (!lu.isInvertible()) fail("SingularTransmission", "T is singular; post-processing undefined");
    Mat Ti = lu.inverse();
    // CP for 𝒢_{T^{-1},N'} in one mode: N' ⪰ 0 and det N' >= (1 - 1/det T)²
    double c = std::abs(1.0 - 1.0 / direct.T.determinant());
    Mat B = Mat::Identity(2, 2) * 2.0 + Ti * direct.N * Ti.transpose();
    // det(B + X) over X ⪰ 0 with det X = c² is minimized by X = c·B/√det B
    return c * symmetrize(B) / std::sqrt(B.determinant());
}

GaussianChannel direct_channel_optimized(const Mat& S, const PartitionSpec& p) {
    GaussianChannel c = direct_channel(S, p);
    Mat Np = optimal_post_noise(c);
    // tiny slack keeps the CP check robust at the boundary
    return direct_channel(S, p, Np * (1.0 + 1e-13));
}

double average_fidelity(const GaussianChannel& c, double tol) {
    if (c.T.rows() != 2 || c.T.cols() != 2) fail("Multimode", "average fidelity is single-mode");
    if ((c.T - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() > tol) return 0.0;
    return 2.0 / std::sqrt((2.0 * Mat::Identity(2, 2) + c.N).determinant());
}

double passive_r(double C) {
    if (!(C > 0.0)) fail("InvalidParameter", "C must be positive");
    return (C - 1.0) / (C + 1.0);
}
double passive_t(double C) {
    if (!(C > 0.0)) fail("InvalidParameter", "C must be positive");
    return 2.0 * std::sqrt(C) / (C + 1.0);
}
double active_r(double C) {
    if (!(C > 0.0) || C == 1.0) fail("InvalidParameter", "active example needs C > 0, C != 1");
    return (C + 1.0) / (C - 1.0);
}
double active_t(double C) {
    if (!(C > 0.0) || C == 1.0) fail("InvalidParameter", "active example needs C > 0, C != 1");
    return 2.0 * std::sqrt(C) / (1.0 - C);
}

Mat passive_example(double C) {
    const double r = passive_r(C), t = passive_t(C);
    Mat S(4, 4);
    S << 0, -t, r, 0,
         t, 0, 0, r,
         r, 0, 0, -t,
         0, r, t, 0;
    return S;
}

Mat active_example(double C) {
    const double r = active_r(C), t = active_t(C);
    Mat S(4, 4);
    S << 0, t, r, 0,
         t, 0, 0, r,
         r, 0, 0, t,
         0, r, t, 0;
    return S;
}

double passive_C_from_t2(double t2) {
    if (!(t2 > 0.0 && t2 <= 1.0)) fail("InvalidParameter", "passive t^2 must lie in (0,1]");
    // t² = 4C/(1+C)²: t²C² + (2t² - 4)C + t² = 0, larger root
    double b = 2.0 * t2 - 4.0;
    double disc = std::max(0.0, b * b - 4.0 * t2 * t2);
    return (-b + std::sqrt(disc)) / (2.0 * t2);
}

double active_C_from_t2(double t2) {
    if (!(t2 > 0.0)) fail("InvalidParameter", "active t'^2 must be positive");
    // t'² = 4C/(1-C)²: t'²C² - (2t'² + 4)C + t'² = 0, root below 1
    double b = 2.0 * t2 + 4.0;
    double disc = b * b - 4.0 * t2 * t2;
    return (b - std::sqrt(disc)) / (2.0 * t2);
}

double passive_adaptive_fidelity(double t2, double mu, double nu) {
    return 1.0 / std::sqrt((1.0 + (1.0 - t2) * mu / 2.0) * (1.0 + (1.0 - t2) * nu / (2.0 * t2)));
}

}  // namespace sympl::transduction
