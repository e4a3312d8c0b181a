#include "sympl/discrete.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>

namespace sympl::discrete {

namespace {

void check_modulus(Int d) {
    if (d < 2) fail("InvalidModulus", "modulus must be >= 2, got " + std::to_string(d));
    if (d > (Int(1) << 30)) fail("InvalidModulus", "modulus too large for exact int64 products");
}

void check_square_even(const IMat& S) {
    if (S.rows() != S.cols() || S.rows() % 2 != 0)
        fail("ShapeMismatch", "square matrix of even dimension expected");
}

// a⁻¹ mod m, or 0 when a is not a unit
Int inverse_unit(Int a, Int m) {
    Int g = m, x = 0, x1 = 1, r = mod(a, m);
    while (r != 0) {
        Int q = g / r;
        Int t = g - q * r;
        g = r;
        r = t;
        t = x - q * x1;
        x = x1;
        x1 = t;
    }
    return g == 1 ? mod(x, m) : 0;
}

IMat inverse_prime_power(const IMat& A, Int m) {
    int n = int(A.rows());
    IMat M(n, 2 * n);
    M << reduce(A, m), identity(n);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        Int inv = 0;
        for (int r = c; r < n && piv < 0; ++r) {
            inv = inverse_unit(M(r, c), m);
            if (inv != 0) piv = r;
        }
        if (piv < 0) fail("NonInvertibleBlock", "matrix is not invertible mod " + std::to_string(m));
        M.row(c).swap(M.row(piv));
        M.row(c) = reduce(IVec((M.row(c) * inv).transpose()), m).transpose();
        for (int r = 0; r < n; ++r) {
            if (r == c || M(r, c) == 0) continue;
            Int f = M(r, c);
            M.row(r) = reduce(IVec((M.row(r) - f * M.row(c)).transpose()), m).transpose();
        }
    }
    return M.rightCols(n);
}

Poly digits(Int x, Int p, int r) {
    Poly a(static_cast<std::size_t>(r), 0);
    for (int j = 0; j < r; ++j) {
        a[static_cast<std::size_t>(j)] = x % p;
        x /= p;
    }
    return a;
}

// Form coefficients are ring constants: -1 stays -1 in 𝔽_p[x].
Poly form_coefficient(Int v, Int p, int r, Int m) {
    v = mod(v, m);
    if (v == m - 1) return Poly{p - 1};
    return digits(v, p, r);
}

Poly poly_sub(const Poly& a, const Poly& b, Int p) {
    Poly nb(b.size());
    for (std::size_t k = 0; k < b.size(); ++k) nb[k] = mod(-b[k], p);
    return poly_add(a, nb, p);
}

FactorReport check_factor(const IMat& B, const IMat& Js, const IMat& Jd, Int p, int r) {
    Int m = 1;
    for (int k = 0; k < r; ++k) m *= p;
    FactorReport f;
    f.modulus = m;
    f.p = p;
    f.r = r;
    IMat Bm = reduce(B, m);
    const int k = int(B.cols()), n = int(B.rows());
    std::vector<Poly> entries(static_cast<std::size_t>(n * k));
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < k; ++i) entries[static_cast<std::size_t>(a * k + i)] = digits(Bm(a, i), p, r);
    auto entry = [&](int a, int i) -> const Poly& { return entries[static_cast<std::size_t>(a * k + i)]; };
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            Poly s{0};
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    if (mod(Js(a, b), m) == 0) continue;
                    Poly t = poly_mul(poly_mul(entry(a, i), entry(b, j), p), form_coefficient(Js(a, b), p, r, m), p);
                    s = poly_add(s, t, p);
                }
            Poly target = form_coefficient(Jd(i, j), p, r, m);
            Poly diff = poly_sub(s, target, p);
            for (int l = 0; l < r; ++l) {
                LocalRingElement dl = ring_diff(diff, p, r, l);
                if (std::any_of(dl.a.begin(), dl.a.end(), [](Int c) { return c != 0; })) {
                    f.failed_l = l;
                    f.i = i;
                    f.j = j;
                    return f;
                }
            }
        }
    }
    f.ok = true;
    return f;
}

Int int_pow(Int b, int e) {
    Int r = 1;
    while (e-- > 0) r *= b;
    return r;
}

}  // namespace

Int mod(Int a, Int d) {
    Int r = a % d;
    return r < 0 ? r + d : r;
}

IMat reduce(const IMat& A, Int d) {
    check_modulus(d);
    return A.unaryExpr([d](Int x) { return mod(x, d); });
}

IVec reduce(const IVec& v, Int d) {
    check_modulus(d);
    return v.unaryExpr([d](Int x) { return mod(x, d); });
}

IMat mul(const IMat& A, const IMat& B, Int d) {
    if (A.cols() != B.rows()) fail("ShapeMismatch", "incompatible matrix product");
    return reduce(IMat(reduce(A, d) * reduce(B, d)), d);
}

IMat identity(int n) { return IMat::Identity(n, n); }

IMat direct_sum(const IMat& A, const IMat& B) {
    IMat R = IMat::Zero(A.rows() + B.rows(), A.cols() + B.cols());
    R.topLeftCorner(A.rows(), A.cols()) = A;
    R.bottomRightCorner(B.rows(), B.cols()) = B;
    return R;
}

bool equal_mod(const IMat& A, const IMat& B, Int d) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) return false;
    return reduce(A, d) == reduce(B, d);
}

bool is_prime(Int n) {
    if (n < 2) return false;
    for (Int k = 2; k * k <= n; ++k)
        if (n % k == 0) return false;
    return true;
}

IMat dv_form(int n_modes, Int d, ModeOrdering ordering) {
    check_modulus(d);
    IMat J = IMat::Zero(2 * n_modes, 2 * n_modes);
    for (int j = 0; j < n_modes; ++j) {
        if (ordering == ModeOrdering::Interleaved) {
            J(2 * j, 2 * j + 1) = 1;
            J(2 * j + 1, 2 * j) = d - 1;
        } else {
            J(j, n_modes + j) = 1;
            J(n_modes + j, j) = d - 1;
        }
    }
    return J;
}

Int pauli_phase(const IVec& u, const IVec& v, Int d) {
    if (u.size() != v.size() || u.size() % 2 != 0) fail("ShapeMismatch", "labels must have equal even length");
    IMat J = dv_form(int(u.size() / 2), d);
    return mod((reduce(u, d).transpose() * J * reduce(v, d))(0, 0), d);
}

Int pauli_phase(const ModVec& u, const ModVec& v) {
    if (u.d != v.d) fail("ModulusMismatch", "labels over different moduli");
    return pauli_phase(u.v, v.v, u.d);
}

IMat inverse_mod(const IMat& A, Int d) {
    check_modulus(d);
    if (A.rows() != A.cols()) fail("ShapeMismatch", "square matrix expected");
    CRTRep rep = crt_split(d);
    std::vector<IMat> parts;
    for (Int m : rep.moduli) parts.push_back(inverse_prime_power(A, m));
    IMat R(A.rows(), A.cols());
    std::vector<Int> res(parts.size());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            for (std::size_t k = 0; k < parts.size(); ++k) res[k] = parts[k](i, j);
            R(i, j) = crt_combine(res, rep);
        }
    return R;
}

IMat symplectic_inverse(const IMat& S, Int d) {
    check_square_even(S);
    IMat J = dv_form(int(S.rows() / 2), d);
    return reduce(IMat(-(J * reduce(S, d).transpose() * J)), d);
}

CRTRep crt_split(Int d) {
    check_modulus(d);
    CRTRep rep;
    rep.d = d;
    Int n = d;
    for (Int p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        rep.primes.push_back(p);
        rep.powers.push_back(e);
        rep.moduli.push_back(int_pow(p, e));
    }
    if (n > 1) {
        rep.primes.push_back(n);
        rep.powers.push_back(1);
        rep.moduli.push_back(n);
    }
    return rep;
}

std::vector<Int> crt_components(Int x, const CRTRep& rep) {
    std::vector<Int> r;
    for (Int m : rep.moduli) r.push_back(mod(x, m));
    return r;
}

Int crt_combine(const std::vector<Int>& residues, const CRTRep& rep) {
    if (residues.size() != rep.moduli.size()) fail("ShapeMismatch", "one residue per CRT factor expected");
    Int x = 0;
    for (std::size_t k = 0; k < residues.size(); ++k) {
        Int m = rep.moduli[k];
        Int M = rep.d / m;
        Int inv = inverse_unit(mod(M, m), m);
        // x += r·M·(M⁻¹ mod m), reduced stepwise to stay in range
        Int term = mod(mod(residues[k], m) * inv, m) * M;
        x = mod(x + term, rep.d);
    }
    return x;
}

LocalRingElement to_local(Int x, Int p, int r) {
    if (!is_prime(p) || r < 1) fail("InvalidModulus", "p prime and r >= 1 required");
    return {p, r, digits(mod(x, int_pow(p, r)), p, r)};
}

Int from_local(const LocalRingElement& b) {
    Int x = 0, w = 1;
    for (int j = 0; j < b.r; ++j) {
        x += b.a[static_cast<std::size_t>(j)] * w;
        w *= b.p;
    }
    return x;
}

Poly poly_mul(const Poly& a, const Poly& b, Int p) {
    if (a.empty() || b.empty()) return Poly{0};
    Poly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = mod(c[i + j] + a[i] * b[j], p);
    return c;
}

Poly poly_add(const Poly& a, const Poly& b, Int p) {
    Poly c(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < c.size(); ++i) {
        Int x = i < a.size() ? a[i] : 0;
        Int y = i < b.size() ? b[i] : 0;
        c[i] = mod(x + y, p);
    }
    return c;
}

LocalRingElement local_mul(const LocalRingElement& a, const LocalRingElement& b) {
    if (a.p != b.p || a.r != b.r) fail("ModulusMismatch", "different local rings");
    Poly c = poly_mul(a.a, b.a, a.p);
    c.resize(static_cast<std::size_t>(a.r), 0);
    return {a.p, a.r, c};
}

LocalRingElement local_add(const LocalRingElement& a, const LocalRingElement& b) {
    if (a.p != b.p || a.r != b.r) fail("ModulusMismatch", "different local rings");
    Poly c = poly_add(a.a, b.a, a.p);
    c.resize(static_cast<std::size_t>(a.r), 0);
    return {a.p, a.r, c};
}

LocalRingElement ring_diff(const Poly& f, Int p, int r, int l) {
    if (l < 0) fail("InvalidParameter", "differential order must be >= 0");
    LocalRingElement out{p, r, Poly(static_cast<std::size_t>(r), 0)};
    for (std::size_t j = static_cast<std::size_t>(l); j < f.size(); ++j) {
        std::size_t k = j - static_cast<std::size_t>(l);
        if (k >= static_cast<std::size_t>(r)) break;
        // j!/(j-l)! mod p
        Int c = 1;
        for (int t = 0; t < l; ++t) c = mod(c * Int(j - static_cast<std::size_t>(t)), p);
        out.a[k] = mod(c * f[j], p);
    }
    return out;
}

LocalRingElement ring_diff(const LocalRingElement& b, int l) { return ring_diff(b.a, b.p, b.r, l); }

DVReport form_check(const IMat& B, const IMat& J_src, const IMat& J_dst, Int d) {
    check_modulus(d);
    if (J_src.rows() != B.rows() || J_src.cols() != B.rows() || J_dst.rows() != B.cols() ||
        J_dst.cols() != B.cols())
        fail("ShapeMismatch", "form and matrix sizes disagree");
    CRTRep rep = crt_split(d);
    DVReport out;
    out.ok = true;
    for (std::size_t k = 0; k < rep.moduli.size(); ++k) {
        out.factors.push_back(check_factor(B, J_src, J_dst, rep.primes[k], rep.powers[k]));
        out.ok = out.ok && out.factors.back().ok;
    }
    return out;
}

DVReport dv_symplectic_report(const IMat& S, Int d, ModeOrdering ordering) {
    check_square_even(S);
    IMat J = dv_form(int(S.rows() / 2), d, ordering);
    return form_check(S, J, J, d);
}

bool is_dv_symplectic(const IMat& S, Int d, ModeOrdering ordering) {
    if (S.rows() != S.cols() || S.rows() % 2 != 0) return false;
    return dv_symplectic_report(S, d, ordering).ok;
}

bool is_symplectic_congruence(const IMat& S, Int d, ModeOrdering ordering) {
    if (S.rows() != S.cols() || S.rows() % 2 != 0) return false;
    IMat J = dv_form(int(S.rows() / 2), d, ordering);
    return equal_mod(IMat(reduce(S, d).transpose() * J * reduce(S, d)), J, d);
}

BasisCheck dv_symplectic_basis_check(const std::vector<IVec>& vectors, Int d, ModeOrdering ordering) {
    if (vectors.empty() || vectors.size() % 2 != 0) fail("ShapeMismatch", "2N vectors expected");
    const int k = int(vectors.size());
    const int dim = int(vectors.front().size());
    if (dim != k) fail("ShapeMismatch", "a basis of E needs 2N vectors of length 2N");
    IMat B(dim, k);
    for (int j = 0; j < k; ++j) {
        if (vectors[static_cast<std::size_t>(j)].size() != dim) fail("ShapeMismatch", "vectors differ in length");
        B.col(j) = vectors[static_cast<std::size_t>(j)];
    }
    B = reduce(B, d);
    IMat J = dv_form(dim / 2, d, ordering);
    BasisCheck r;
    r.gram = reduce(IMat(B.transpose() * J * B), d);
    // e's then f's: the grouped form on the basis indices
    r.report = form_check(B, J, dv_form(k / 2, d, ModeOrdering::Grouped), d);
    r.ok = r.report.ok;
    return r;
}

Gate hadamard(int q) { return {Gate::Kind::H, q, q, {}}; }
Gate cnot(int control, int target) {
    if (control == target) fail("InvalidGate", "CNOT control equals target");
    return {Gate::Kind::CNOT, control, target, {}};
}
Gate phase(int q) { return {Gate::Kind::Phase, q, q, {}}; }
Gate custom_gate(std::vector<IVec> images) { return {Gate::Kind::Custom, 0, 0, std::move(images)}; }

Gate gate_from_string(const std::string& name, const std::vector<int>& qudits) {
    auto need = [&](std::size_t k) {
        if (qudits.size() != k) fail("InvalidGate", name + " expects " + std::to_string(k) + " qudit indices");
    };
    if (name == "H" || name == "F") {
        need(1);
        return hadamard(qudits[0]);
    }
    if (name == "CNOT" || name == "CX" || name == "SUM") {
        need(2);
        return cnot(qudits[0], qudits[1]);
    }
    if (name == "S" || name == "P") {
        need(1);
        return phase(qudits[0]);
    }
    fail("UnknownGate", "unknown gate '" + name + "'");
}

IMat gate_to_symplectic(const Gate& g, int n, Int d) {
    check_modulus(d);
    if (n < 1) fail("InvalidParameter", "need at least one qudit");
    auto in_range = [n](int q) { return q >= 0 && q < n; };
    // M holds the image of generator e_k in column k; S = Mᵗ.
    IMat M = identity(2 * n);
    switch (g.kind) {
        case Gate::Kind::H: {
            if (!in_range(g.a)) fail("InvalidGate", "qudit index out of range");
            int q = 2 * g.a, p = q + 1;
            // Z -> X⁻¹, X -> Z
            M(q, q) = 0;
            M(p, p) = 0;
            M(p, q) = d - 1;
            M(q, p) = 1;
            break;
        }
        case Gate::Kind::CNOT: {
            if (!in_range(g.a) || !in_range(g.b) || g.a == g.b) fail("InvalidGate", "bad CNOT indices");
            // X_c -> X_c X_t, Z_t -> Z_c⁻¹ Z_t
            M(2 * g.b + 1, 2 * g.a + 1) = 1;
            M(2 * g.a, 2 * g.b) = d - 1;
            break;
        }
        case Gate::Kind::Phase: {
            if (!in_range(g.a)) fail("InvalidGate", "qudit index out of range");
            // X -> ZX
            M(2 * g.a, 2 * g.a + 1) = 1;
            break;
        }
        case Gate::Kind::Custom: {
            if (int(g.images.size()) != 2 * n) fail("InvalidGate", "custom gate needs 2N image labels");
            for (int k = 0; k < 2 * n; ++k) {
                if (g.images[static_cast<std::size_t>(k)].size() != 2 * n)
                    fail("InvalidGate", "image label has the wrong length");
                M.col(k) = g.images[static_cast<std::size_t>(k)];
            }
            break;
        }
    }
    IMat S = reduce(IMat(M.transpose()), d);
    if (g.kind == Gate::Kind::Custom && !is_symplectic_congruence(S, d))
        fail("NotSymplectic", "custom conjugation table does not preserve σ");
    return S;
}

IMat circuit_compose(const std::vector<Gate>& gates, int n, Int d) {
    IMat S = identity(2 * n);
    for (const Gate& g : gates) S = mul(S, gate_to_symplectic(g, n, d), d);
    return S;
}

IMat circuit_compose(const std::vector<IMat>& factors, Int d) {
    if (factors.empty()) fail("ShapeMismatch", "empty factor list has no dimension");
    IMat S = identity(int(factors.front().rows()));
    for (const IMat& F : factors) {
        if (F.rows() != S.cols()) fail("ShapeMismatch", "factor dimensions differ");
        S = mul(S, F, d);
    }
    return S;
}

IMat block(const IMat& S, const std::vector<int>& rows, const std::vector<int>& cols) {
    IMat B(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) {
            int r = rows[i], c = cols[j];
            if (r < 0 || r >= S.rows() || c < 0 || c >= S.cols()) fail("ShapeMismatch", "partition index out of range");
            B(Eigen::Index(i), Eigen::Index(j)) = S(r, c);
        }
    return B;
}

DVTeleport dv_teleport_transform(const IMat& S, const DVPartition& p, Int d) {
    check_square_even(S);
    if (p.h.size() != p.z.size()) fail("ShapeMismatch", "h and z' must have equal size");
    IMat Shz_inv = inverse_mod(block(S, p.h, p.z), d);
    IMat Soz = block(S, p.out, p.z);
    DVTeleport t;
    t.F_star = mul(Soz, Shz_inv, d);
    t.S_tilde = reduce(IMat(block(S, p.out, p.in) - mul(t.F_star, block(S, p.h, p.in), d)), d);
    return t;
}

IVec feedforward(const IMat& F_star, const IVec& syndrome, Int d) {
    if (syndrome.size() != F_star.cols()) fail("ShapeMismatch", "syndrome length mismatch");
    return reduce(IVec(reduce(F_star, d) * reduce(syndrome, d)), d);
}

std::string pauli_string(const IVec& u, Int d) {
    if (u.size() % 2 != 0) fail("ShapeMismatch", "label length must be even");
    std::string s;
    for (Eigen::Index j = 0; j < u.size() / 2; ++j) {
        Int q = mod(u(2 * j), d), x = mod(u(2 * j + 1), d);
        std::string part;
        if (q == 0 && x == 0) part = "I";
        if (q > 0) part += q == 1 ? "Z" : "Z^" + std::to_string(q);
        if (x > 0) part += x == 1 ? "X" : "X^" + std::to_string(x);
        if (!s.empty()) s += ' ';
        s += part;
    }
    return s;
}

CMat weyl_operator(const IVec& u, Int d) {
    check_modulus(d);
    if (u.size() % 2 != 0) fail("ShapeMismatch", "label length must be even");
    Eigen::Index n = u.size() / 2;
    Int dim = 1;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (dim > 4096 / d) fail("RangeError", "dense Weyl operator too large");
        dim *= d;
    }
    // D is monomial: |k⟩ -> phase · |k + x⟩ on every factor
    CMat D = CMat::Zero(dim, dim);
    for (Int k = 0; k < dim; ++k) {
        Int col = k, row = 0, stride = 1, expo = 0;
        for (Eigen::Index j = n - 1; j >= 0; --j) {
            Int kj = col % d;
            col /= d;
            Int out = mod(kj + u(2 * j + 1), d);
            expo += mod(u(2 * j), d) * out;
            row += out * stride;
            stride *= d;
        }
        D(row, k) = std::polar(1.0, 2 * std::numbers::pi * double(mod(expo, d)) / double(d));
    }
    return D;
}

std::complex<double> dv_characteristic(const CMat& rho, const IVec& u, Int d) {
    check_modulus(d);
    if (u.size() != 2) fail("ShapeMismatch", "single-qudit label expected");
    if (rho.rows() != d || rho.cols() != d) fail("ShapeMismatch", "density matrix must be d×d");
    return (weyl_operator(IVec(-u), d) * rho).trace() / double(d);
}

std::complex<double> dv_wigner(const CMat& rho, const IVec& u, Int d) {
    std::complex<double> w = 0;
    IVec v(2);
    for (Int q = 0; q < d; ++q)
        for (Int p = 0; p < d; ++p) {
            v << q, p;
            w += std::polar(1.0, 2 * std::numbers::pi * double(pauli_phase(u, v, d)) / double(d)) *
                 dv_characteristic(rho, v, d);
        }
    return w / double(d);
}

std::vector<Gate> teleportation_circuit() { return {hadamard(0), cnot(0, 1), cnot(1, 2), hadamard(1)}; }

DVPartition teleportation_partition() { return {{0, 1}, {4, 5}, {0, 2}, {3, 5}}; }

std::vector<Gate> gate_teleportation_circuit() { return {cnot(0, 1), cnot(2, 3), cnot(1, 2), hadamard(1)}; }

DVPartition gate_teleportation_partition() { return {{0, 1, 6, 7}, {0, 1, 6, 7}, {2, 5}, {3, 5}}; }

}  // namespace sympl::discrete
