#include "sympl/control.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace sympl::control {

namespace {

Mat omega1() {
    Mat O(2, 2);
    O << 0, -1, 1, 0;
    return O;
}

// rotation taking e1 to v/|v|
Mat rot_to(double x, double y) {
    double a = std::atan2(y, x), c = std::cos(a), s = std::sin(a);
    Mat R(2, 2);
    R << c, -s, s, c;
    return R;
}

Mat block_connector(const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
    double lam = v.norm() / u.norm();
    Mat D = Mat::Zero(2, 2);
    D(0, 0) = lam;
    D(1, 1) = 1.0 / lam;
    return rot_to(v(0), v(1)) * D * rot_to(u(0), u(1)).transpose();
}

int modes_checked(const Mat& S) {
    int n = modes_of(S);
    if (n < 2) fail("DimensionMismatch", "sandwich constructions need at least two modes");
    return n;
}

void check_mode(int n, int a, const char* what) {
    if (a < 0 || a >= n) fail("DimensionMismatch", std::string(what) + " mode out of range");
}

std::vector<int> sorted(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

Mat LocalSymplectic::matrix() const {
    const int n = n_modes();
    Mat L = Mat::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) L.block(2 * j, 2 * j, 2, 2) = blocks[std::size_t(j)];
    return L;
}

LocalSymplectic local_identity(int n) {
    return LocalSymplectic{std::vector<Mat>(std::size_t(n), Mat::Identity(2, 2))};
}

LocalSymplectic make_local(const std::vector<Mat>& blocks, double tol) {
    for (std::size_t j = 0; j < blocks.size(); ++j) {
        if (blocks[j].rows() != 2 || blocks[j].cols() != 2)
            fail("DimensionMismatch", "local blocks must be 2x2");
        if (std::abs(blocks[j].determinant() - 1.0) > tol)
            fail("NotSymplectic", "local block " + std::to_string(j) + " has det != 1");
    }
    return LocalSymplectic{blocks};
}

LocalSymplectic local_connector(const Vec& u, const Vec& v, double c) {
    if (u.size() != v.size() || u.size() % 2) fail("DimensionMismatch", "u and v must match");
    if (c == 0.0) fail("InvalidParameter", "c must be nonzero");
    const int n = int(u.size() / 2);
    const Vec cv = c * v;
    const double su = 1e-10 * std::max(1.0, u.norm()), sv = 1e-10 * std::max(1.0, cv.norm());
    LocalSymplectic L = local_identity(n);
    std::vector<int> bad;
    for (int j = 0; j < n; ++j) {
        Eigen::Vector2d uj = u.segment<2>(2 * j), vj = cv.segment<2>(2 * j);
        const double nu = uj.norm(), nv = vj.norm();
        if (nu < su && nv < sv) continue;
        if (!(nu > 1e-8 && nv > 1e-8)) {
            bad.push_back(j);
            continue;
        }
        L.blocks[std::size_t(j)] = block_connector(uj, vj);
    }
    if (!bad.empty()) {
        std::ostringstream os;
        os << "blocks of u and v differ in support at modes";
        for (int j : bad) os << ' ' << j;
        fail("BlockwiseMismatch", os.str());
    }
    return L;
}

LocalSymplectic sandwich_pair(const Mat& Sl, const Mat& Sr, int a, int b, double c) {
    const int n = modes_checked(Sl);
    if (modes_of(Sr) != n) fail("DimensionMismatch", "factors differ in size");
    check_mode(n, a, "row");
    check_mode(n, b, "column");
    const Vec y = Sr.col(2 * b);
    const Vec z = Sl.row(2 * a).transpose();
    return local_connector(y, -c * (omega_matrix(n) * z), 1.0);
}

LocalSymplectic sandwich_pivot(const Mat& Q, const Mat& P, int a, int b, int m) {
    const int n = modes_checked(Q);
    if (modes_of(P) != n) fail("DimensionMismatch", "factors differ in size");
    check_mode(n, a, "row");
    check_mode(n, b, "column");
    check_mode(n, m, "pivot");
    const Mat O = omega_matrix(n), O1 = omega1();
    const Vec y2 = P.col(2 * b + 1);
    const Vec Oz1 = O * Q.row(2 * a).transpose();
    const Vec Oz2 = O * Q.row(2 * a + 1).transpose();

    Mat A(2, 2);
    A << Oz2.segment<2>(2 * m), Oz1.segment<2>(2 * m);
    Eigen::JacobiSVD<Mat> svd(A);
    const Vec& s = svd.singularValues();
    if (!(s(1) > 1e-8 * std::max(1.0, s(0))))
        fail("GenericityFailure", "pivot mode " + std::to_string(m) + " is degenerate");
    const Vec ab = A.partialPivLu().solve(O1 * y2.segment<2>(2 * m));
    const double alpha = ab(0);
    if (!(std::abs(alpha) > 1e-12)) fail("GenericityFailure", "vanishing pivot coefficient");

    LocalSymplectic L = local_identity(n);
    const double zero = 1e-10 * std::max(1.0, y2.norm());
    for (int j = 0; j < n; ++j) {
        if (j == m) {
            L.blocks[std::size_t(j)] = O1;
            continue;
        }
        if (y2.segment<2>(2 * j).norm() <= zero) continue;
        L.blocks[std::size_t(j)] =
            local_connector(y2.segment<2>(2 * j), Oz2.segment<2>(2 * j), alpha).blocks[0];
    }
    return L;
}

double off_block(const Mat& M, int a, int b) {
    Mat X = M.middleCols(2 * b, 2);
    X.middleRows(2 * a, 2).setZero();
    Mat Y = M.middleRows(2 * a, 2);
    Y.middleCols(2 * b, 2).setZero();
    return std::max(X.cwiseAbs().maxCoeff(), Y.cwiseAbs().maxCoeff());
}

SandwichResult sandwich_transduce(const Mat& Sa, const Mat& Sb, const Mat& Sc, const Mat& Sd,
                                  int a, int b) {
    const int n = modes_checked(Sa);
    for (const Mat* M : {&Sb, &Sc, &Sd})
        if (M->rows() != Sa.rows() || M->cols() != Sa.cols())
            fail("DimensionMismatch", "factors differ in size");
    check_mode(n, a, "target");
    check_mode(n, b, "source");

    bool found = false;
    SandwichResult best;
    std::string last = "no admissible pivot";
    for (int m = 0; m < n; ++m) {
        try {
            SandwichResult r;
            r.pivot = m;
            r.L1 = sandwich_pair(Sc, Sd, m, b);
            const Mat P = Sc * r.L1.matrix() * Sd;
            r.L3 = sandwich_pair(Sa, Sb, a, m);
            const Mat Q = Sa * r.L3.matrix() * Sb;
            r.L2 = sandwich_pivot(Q, P, a, b, m);
            r.S = Q * r.L2.matrix() * P;
            r.residual = off_block(r.S, a, b);
            if (!found || r.residual < best.residual) best = std::move(r);
            found = true;
        } catch (const Error& e) {
            if (e.code() == "DimensionMismatch") throw;
            last = e.what();
        }
    }
    if (!found) fail("GenericityFailure", "sandwich construction failed: " + last);
    return best;
}

SandwichResult sandwich_decouple(const Mat& Sa, const Mat& Sb, const Mat& Sc, const Mat& Sd, int a) {
    return sandwich_transduce(Sa, Sb, Sc, Sd, a, a);
}

Mat assemble(const std::vector<Mat>& S, const std::vector<LocalSymplectic>& L) {
    if (S.size() != L.size() + 1) fail("DimensionMismatch", "need one more factor than locals");
    Mat R = S[0];
    for (std::size_t i = 0; i < L.size(); ++i) R = S[i + 1] * L[i].matrix() * R;
    return R;
}

SwapResult sandwich_swap(const std::vector<Mat>& S, int j, int k) {
    if (S.size() != 16) fail("DimensionMismatch", "swap needs 16 factors");
    const int n = modes_checked(S[0]);
    for (const Mat& M : S)
        if (M.rows() != S[0].rows() || M.cols() != S[0].cols())
            fail("DimensionMismatch", "factors differ in size");
    check_mode(n, j, "first");
    check_mode(n, k, "second");
    if (j == k) fail("InvalidParameter", "swap needs two distinct modes");

    SwapResult out;
    out.j = j;
    out.k = k;
    const SandwichResult T0 = sandwich_transduce(S[3], S[2], S[1], S[0], j, k);
    if (n == 2) {
        // two modes: E_k -> E_j already forces the anti-diagonal pattern
        out.L = {T0.L1, T0.L2, T0.L3};
        out.S = T0.S;
        out.residual = std::max(off_block(out.S, j, k), off_block(out.S, k, j));
        return out;
    }
    const SandwichResult D1 = sandwich_decouple(S[7], S[6], S[5], S[4], j);
    const SandwichResult D2 = sandwich_decouple(S[11], S[10], S[9], S[8], j);
    const SandwichResult D3 = sandwich_decouple(S[15], S[14], S[13], S[12], j);

    bool found = false;
    std::string last = "no admissible pivot";
    for (int m = 0; m < n; ++m) {
        if (m == j) continue;
        try {
            LocalSymplectic La = sandwich_pair(D1.S, T0.S, m, j);
            const Mat P = D1.S * La.matrix() * T0.S;
            LocalSymplectic Lc = sandwich_pair(D3.S, D2.S, k, m);
            const Mat Q = D3.S * Lc.matrix() * D2.S;
            LocalSymplectic Lb = sandwich_pivot(Q, P, k, j, m);
            Mat R = Q * Lb.matrix() * P;
            double res = std::max(off_block(R, k, j), off_block(R, j, k));
            if (!found || res < out.residual) {
                out.S = std::move(R);
                out.residual = res;
                out.L = {T0.L1, T0.L2, T0.L3, La, D1.L1, D1.L2, D1.L3, Lb,
                         D2.L1, D2.L2, D2.L3, Lc, D3.L1, D3.L2, D3.L3};
            }
            found = true;
        } catch (const Error& e) {
            if (e.code() == "DimensionMismatch") throw;
            last = e.what();
        }
    }
    if (!found) fail("GenericityFailure", "swap construction failed: " + last);
    return out;
}

SwapResult sandwich_swap(const std::vector<Mat>& S) {
    if (S.empty()) fail("DimensionMismatch", "swap needs 16 factors");
    return sandwich_swap(S, 0, modes_of(S[0]) - 1);
}

SupportMap support_map(const Mat& S, double tol) {
    const int n = modes_of(S);
    if (tol < 0) tol = 1e-10 * S.cwiseAbs().maxCoeff();
    SupportMap f;
    f.f = BoolMat::Zero(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            f.f(r, c) = S.block(2 * r, 2 * c, 2, 2).cwiseAbs().maxCoeff() > tol ? 1 : 0;
    return f;
}

SupportMap make_support(const BoolMat& f) {
    if (f.rows() != f.cols()) fail("DimensionMismatch", "support map must be square");
    for (Eigen::Index i = 0; i < f.size(); ++i)
        if (f.data()[i] != 0 && f.data()[i] != 1) fail("InvalidParameter", "support map must be 0/1");
    return SupportMap{f};
}

BoolMat bool_product(const BoolMat& A, const BoolMat& B) {
    return (A * B).unaryExpr([](int x) { return x > 0 ? 1 : 0; });
}

BoolMat bool_power(const BoolMat& A, int c) {
    if (c < 1) fail("InvalidParameter", "power must be positive");
    BoolMat R = A;
    for (int i = 1; i < c; ++i) R = bool_product(A, R);
    return R;
}

BlockDecomposition block_decomposition(const BoolMat& f) {
    const int n = int(f.rows());
    // nodes: columns 0..n-1, rows n..2n-1
    std::vector<int> parent(std::size_t(2 * n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[std::size_t(x)] != x) x = parent[std::size_t(x)] = parent[std::size_t(parent[std::size_t(x)])];
        return x;
    };
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (f(r, c)) parent[std::size_t(find(c))] = find(n + r);
    std::map<int, int> label;
    BlockDecomposition d;
    for (int c = 0; c < n; ++c) {
        int root = find(c);
        if (!label.count(root)) {
            label[root] = int(d.cols.size());
            d.cols.emplace_back();
            d.rows.emplace_back();
        }
        d.cols[std::size_t(label[root])].push_back(c);
    }
    for (int r = 0; r < n; ++r) {
        auto it = label.find(find(n + r));
        if (it == label.end()) {
            // empty row: its own component without columns
            d.cols.emplace_back();
            d.rows.push_back({r});
        } else {
            d.rows[std::size_t(it->second)].push_back(r);
        }
    }
    return d;
}

namespace {

bool stable(const BoolMat& f) {
    BlockDecomposition d = block_decomposition(f);
    for (std::size_t l = 0; l < d.cols.size(); ++l) {
        if (d.cols[l] != d.rows[l]) return false;
        for (int r : d.rows[l])
            for (int c : d.cols[l])
                if (!f(r, c)) return false;
    }
    return true;
}

// P(l) = m when the columns of summand l land exactly on summand m
bool summand_permutation(const BoolMat& f, const std::vector<std::vector<int>>& summands,
                         const std::vector<int>& summand_of, Permutation& P) {
    const std::size_t M = summands.size();
    P.assign(M, -1);
    std::vector<int> hit(M, 0);
    for (std::size_t l = 0; l < M; ++l) {
        std::vector<int> rows;
        for (int r = 0; r < f.rows(); ++r)
            for (int c : summands[l])
                if (f(r, c)) {
                    rows.push_back(r);
                    break;
                }
        if (rows.empty()) return false;
        int m = summand_of[std::size_t(rows[0])];
        if (sorted(rows) != summands[std::size_t(m)]) return false;
        P[l] = m;
        if (hit[std::size_t(m)]++) return false;
    }
    return true;
}

std::vector<int> key(const BoolMat& f) { return std::vector<int>(f.data(), f.data() + f.size()); }

}  // namespace

Stabilization stabilize(const SupportMap& sm) {
    const BoolMat& F = sm.f;
    const int n = sm.n();
    if (n < 1) fail("DimensionMismatch", "empty support map");
    Stabilization st;

    // Boolean powers are eventually periodic; stop once a power repeats
    std::map<std::vector<int>, int> seen;
    BoolMat Fc = F;
    int c = 1;
    for (;; ++c) {
        if (stable(Fc)) break;
        if (!seen.emplace(key(Fc), c).second)
            fail("Unstable", "support powers cycle without reaching a stable form");
        Fc = bool_product(F, Fc);
    }
    st.c = c;
    st.f_c = Fc;
    BlockDecomposition d = block_decomposition(Fc);
    st.summands = d.cols;
    st.summand_of.assign(std::size_t(n), -1);
    for (std::size_t l = 0; l < st.summands.size(); ++l)
        for (int j : st.summands[l]) st.summand_of[std::size_t(j)] = int(l);

    const Permutation id = identity_permutation(int(st.summands.size()));
    st.permutations.push_back(id);
    BoolMat Fn = Fc;
    st.d = c;
    for (int step = 0; step < 1 << 16; ++step) {
        Fn = bool_product(F, Fn);
        Permutation P;
        if (!summand_permutation(Fn, st.summands, st.summand_of, P) || P == id) break;
        st.permutations.push_back(P);
        ++st.d;
    }
    return st;
}

Stabilization stabilize(const Mat& S) { return stabilize(support_map(S)); }

SwapCertificate classify_swappable(const Stabilization& st, int j, int k) {
    const int n = int(st.summand_of.size());
    if (j < 0 || j >= n || k < 0 || k >= n) fail("DimensionMismatch", "mode out of range");
    SwapCertificate cert;
    const int l = st.summand_of[std::size_t(j)], m = st.summand_of[std::size_t(k)];
    if (l == m) {
        cert.swappable = true;
        cert.summand = l;
        return cert;
    }
    for (std::size_t i = 0; i < st.permutations.size(); ++i) {
        const Permutation& P = st.permutations[i];
        if (P[std::size_t(l)] == m && P[std::size_t(m)] == l) {
            cert.swappable = true;
            cert.power = st.c + int(i);
            return cert;
        }
    }
    return cert;
}

SwapCertificate classify_swappable(const Mat& S, int j, int k) {
    return classify_swappable(stabilize(S), j, k);
}

Permutation identity_permutation(int n) {
    Permutation p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    return p;
}

Permutation transposition(int n, int j, int k) {
    Permutation p = identity_permutation(n);
    std::swap(p[std::size_t(j)], p[std::size_t(k)]);
    return p;
}

Permutation compose(const Permutation& p, const Permutation& q) {
    if (p.size() != q.size()) fail("DimensionMismatch", "permutations differ in size");
    Permutation r(p.size());
    for (std::size_t i = 0; i < q.size(); ++i) r[i] = p[std::size_t(q[i])];
    return r;
}

std::vector<std::pair<int, int>> transpositions(const Permutation& p) {
    const std::size_t n = p.size();
    std::vector<int> check(n, 0);
    for (int x : p) {
        if (x < 0 || std::size_t(x) >= n || check[std::size_t(x)]++)
            fail("InvalidParameter", "not a permutation");
    }
    std::vector<std::pair<int, int>> out;
    std::vector<bool> done(n, false);
    for (std::size_t s = 0; s < n; ++s) {
        if (done[s]) continue;
        std::vector<int> cyc;
        for (int x = int(s); !done[std::size_t(x)]; x = p[std::size_t(x)]) {
            done[std::size_t(x)] = true;
            cyc.push_back(x);
        }
        // (a0 a1)∘(a1 a2)∘…: the rightmost factor is applied first
        for (std::size_t i = cyc.size(); i-- > 1;) out.emplace_back(cyc[i - 1], cyc[i]);
    }
    return out;
}

BoolMat permutation_support(const Permutation& p) {
    const int n = int(p.size());
    BoolMat f = BoolMat::Zero(n, n);
    for (int i = 0; i < n; ++i) f(p[std::size_t(i)], i) = 1;
    return f;
}

}  // namespace sympl::control
