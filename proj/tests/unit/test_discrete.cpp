#include <complex>
#include <numbers>

#include "doctest.h"
#include "dv_oracle.hpp"
#include "support.hpp"
#include "sympl/discrete.hpp"

using namespace sympl;
using namespace sympl::discrete;
using cd = std::complex<double>;
using CM = Eigen::MatrixXcd;
using namespace testing::dv;

namespace {

IMat imat(int r, int c, std::initializer_list<Int> v) {
    IMat M(r, c);
    auto it = v.begin();
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) M(i, j) = *it++;
    return M;
}

IVec iv(std::initializer_list<Int> v) {
    IVec r(Eigen::Index(v.size()));
    std::copy(v.begin(), v.end(), r.data());
    return r;
}

}  // namespace

TEST_CASE("clock and shift oracle sanity: ZX = ωXZ") {
    for (Int d = 2; d <= 5; ++d) {
        CM Z = clock(d), X = shift(d);
        CHECK((Z * X - root(d, 1) * X * Z).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("single-qudit gates agree with brute-force conjugation, d <= 5") {
    for (Int d = 2; d <= 5; ++d) {
        CHECK(conjugation_agrees(fourier(d), gate_to_symplectic(hadamard(0), 1, d), 1, d));
        CHECK(conjugation_agrees(phase_gate(d), gate_to_symplectic(phase(0), 1, d), 1, d));
        for (int q = 0; q < 2; ++q) {
            CHECK(conjugation_agrees(embed1(fourier(d), q, 2, d), gate_to_symplectic(hadamard(q), 2, d), 2, d));
            CHECK(conjugation_agrees(embed1(phase_gate(d), q, 2, d), gate_to_symplectic(phase(q), 2, d), 2, d));
        }
    }
}

TEST_CASE("SUM gate agrees with brute-force conjugation, d <= 5") {
    for (Int d = 2; d <= 5; ++d) {
        CHECK(conjugation_agrees(sum_gate(d, true), gate_to_symplectic(cnot(0, 1), 2, d), 2, d));
        CHECK(conjugation_agrees(sum_gate(d, false), gate_to_symplectic(cnot(1, 0), 2, d), 2, d));
    }
}

TEST_CASE("composed circuits agree with the product of unitaries") {
    for (Int d = 2; d <= 5; ++d) {
        std::vector<Gate> gates = {hadamard(0), cnot(0, 1), phase(1), hadamard(1), cnot(1, 0)};
        CM U = CM::Identity(d * d, d * d);
        U = embed1(fourier(d), 0, 2, d) * U;
        U = sum_gate(d, true) * U;
        U = embed1(phase_gate(d), 1, 2, d) * U;
        U = embed1(fourier(d), 1, 2, d) * U;
        U = sum_gate(d, false) * U;
        IMat S = circuit_compose(gates, 2, d);
        CHECK(conjugation_agrees(U, S, 2, d));
        INFO("d = " << d << "\n" << S);
        CHECK(is_symplectic_congruence(S, d));
        // the differential conditions only bite at prime powers; this Clifford fails them at d = 4
        if (is_prime(d)) CHECK(is_dv_symplectic(S, d));
        else CHECK_FALSE(is_dv_symplectic(S, d));
    }
}

TEST_CASE("Weyl commutation phase matches σ") {
    // D(u) D(v) = ω^{σ(u,v)} D(v) D(u)
    for (Int d : {2, 3, 4}) {
        IVec u(4), v(4);
        u << 1, 2, 0, 1;
        v << 3, 1, 1, 2;
        CM A = weyl(u, d) * weyl(v, d), B = weyl(v, d) * weyl(u, d);
        Int s = pauli_phase(u, v, d);
        CHECK((A - root(d, double(s)) * B).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(s == mod((u.transpose() * dv_form(2, d) * v)(0, 0), d));
    }
    CHECK_THROWS_AS(pauli_phase(ModVec{IVec::Zero(2), 2}, ModVec{IVec::Zero(2), 3}), Error);
}

TEST_CASE("modular arithmetic helpers") {
    CHECK(mod(-1, 5) == 4);
    CHECK(mod(7, 5) == 2);
    CHECK(is_prime(7));
    CHECK_FALSE(is_prime(9));
    IMat A = imat(2, 2, {5, 4, 3, 5});
    CHECK(equal_mod(mul(A, inverse_mod(A, 6), 6), identity(2), 6));
    CHECK_THROWS_AS(inverse_mod(imat(2, 2, {2, 0, 0, 1}), 6), Error);
    IMat S = imat(4, 4, {5, 4, 0, 0, 3, 5, 0, 0, 0, 0, 5, 3, 0, 0, 2, 5});
    CHECK(equal_mod(mul(symplectic_inverse(S, 6), S, 6), identity(4), 6));
}

TEST_CASE("Chinese remainder round trip") {
    auto rep = crt_split(360);
    CHECK(rep.primes == std::vector<Int>{2, 3, 5});
    CHECK(rep.powers == std::vector<int>{3, 2, 1});
    for (Int x : {0, 1, 17, 359}) CHECK(crt_combine(crt_components(x, rep), rep) == x);
    auto six = crt_split(6);
    CHECK(crt_combine({mod(10, 2), mod(10, 3)}, six) == 4);
}

TEST_CASE("local ring arithmetic") {
    for (Int x : {0, 5, 7, 26}) {
        auto a = to_local(x, 3, 3);
        CHECK(from_local(a) == x);
    }
    auto a = to_local(4, 3, 2), b = to_local(5, 3, 2);
    // 4 -> 1 + x, 5 -> 2 + x
    CHECK(from_local(local_add(a, b)) == 6);
    // (1 + x)(2 + x) = 2 mod (3, x²): the digit map is not a ring map
    CHECK(from_local(local_mul(a, b)) == 2);
    // d(x²) = 2x over 𝔽_3
    auto u = to_local(3, 3, 2);
    auto sq = poly_mul(u.a, u.a, 3);
    auto dd = ring_diff(sq, 3, 2, 1);
    CHECK(dd.a[0] == 0);
    CHECK(dd.a[1] == 2);
}

TEST_CASE("symplectic membership") {
    IMat S = imat(4, 4, {5, 4, 0, 0, 3, 5, 0, 0, 0, 0, 5, 3, 0, 0, 2, 5});
    CHECK(is_dv_symplectic(S, 6));
    CHECK(is_dv_symplectic(S, 6, ModeOrdering::Grouped));
    // diag(4, 7) mod 9: congruence holds, a higher differential does not
    IMat D = imat(2, 2, {4, 0, 0, 7});
    CHECK(is_symplectic_congruence(D, 9));
    auto r = dv_symplectic_report(D, 9);
    CHECK_FALSE(r.ok);
    CHECK(r.factors[0].failed_l == 1);
    CHECK_FALSE(is_dv_symplectic(imat(2, 2, {1, 1, 1, 1}), 2));
    for (Int d : {2, 3, 5, 7})
        for (int q = 0; q < 2; ++q) CHECK(is_dv_symplectic(gate_to_symplectic(hadamard(q), 2, d), d));
}

TEST_CASE("symplectic basis check") {
    std::vector<IVec> good = {iv({5, 3}), iv({2, 5})}, bad = {iv({2, 0}), iv({0, 3})};
    auto ok = dv_symplectic_basis_check(good, 6);
    CHECK(ok.ok);
    CHECK(ok.gram(0, 1) == 1);
    CHECK_FALSE(dv_symplectic_basis_check(bad, 6).ok);
}

TEST_CASE("teleportation circuit") {
    IMat S = circuit_compose(teleportation_circuit(), 3, 2);
    IMat expect = imat(6, 6, {0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0,
                              0, 0, 1, 0, 0, 1, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 1});
    CHECK(S == expect);
    auto t = dv_teleport_transform(S, teleportation_partition());
    CHECK(t.S_tilde == identity(2));
    CHECK(t.F_star == imat(2, 2, {0, 1, 1, 0}));
    IVec s(2);
    s << 0, 1;
    CHECK(pauli_string(feedforward(t.F_star, s)) == "Z");
    s << 1, 1;
    CHECK(pauli_string(feedforward(t.F_star, s)) == "ZX");
}

TEST_CASE("gate teleportation circuit") {
    IMat S = circuit_compose(gate_teleportation_circuit(), 4, 2);
    auto t = dv_teleport_transform(S, gate_teleportation_partition());
    CHECK(t.S_tilde == imat(4, 4, {1, 0, 0, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 0, 0, 1}));
    CHECK(t.F_star == imat(4, 2, {0, 0, 0, 1, 1, 0, 0, 0}));
    CHECK(gate_to_symplectic(cnot(0, 1), 2, 2) == t.S_tilde);
}

TEST_CASE("gate parsing and validation") {
    CHECK(gate_from_string("CX", {0, 1}).kind == Gate::Kind::CNOT);
    CHECK(gate_from_string("F", {2}).kind == Gate::Kind::H);
    CHECK(gate_from_string("S", {0}).kind == Gate::Kind::Phase);
    CHECK_THROWS_AS(gate_from_string("T", {0}), Error);
    CHECK_THROWS_AS(gate_to_symplectic(cnot(0, 0), 2, 2), Error);
    CHECK_THROWS_AS(gate_to_symplectic(hadamard(3), 2, 2), Error);
    IVec x(2), z(2);
    x << 0, 1;
    z << 1, 0;
    // custom gate equal to the Hadamard
    IVec zi(2);
    zi << 0, -1;
    CHECK(equal_mod(gate_to_symplectic(custom_gate({zi, z}), 1, 3), gate_to_symplectic(hadamard(0), 1, 3), 3));
}

TEST_CASE("Pauli strings") {
    IVec u(4);
    u << 2, 1, 0, 0;
    CHECK(pauli_string(u, 3) == "Z^2X I");
    u << 0, 0, 0, 0;
    CHECK(pauli_string(u, 2) == "I I");
}

TEST_CASE("dense Weyl operators match the clock/shift products") {
    for (Int d = 2; d <= 4; ++d)
        for (int n = 1; n <= 2; ++n)
            for (int t = 0; t < 6; ++t) {
                IVec u(2 * n);
                for (int k = 0; k < 2 * n; ++k) u(k) = (3 * t + 5 * k + 1) % d;
                CHECK((weyl_operator(u, d) - weyl(u, d)).cwiseAbs().maxCoeff() < 1e-12);
            }
}

namespace {

CM random_density(Int d, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    CM A(d, d);
    for (Int i = 0; i < d; ++i)
        for (Int j = 0; j < d; ++j) A(i, j) = cd(nd(rng), nd(rng));
    CM rho = A * A.adjoint();
    return rho / rho.trace();
}

}  // namespace

TEST_CASE("single-qudit Wigner function") {
    // |0⟩⟨0| of a qubit: W = 1/2 on p = 0
    CM rho0 = CM::Zero(2, 2);
    rho0(0, 0) = 1;
    CHECK(std::abs(dv_wigner(rho0, iv({0, 0}), 2) - 0.5) < 1e-12);
    CHECK(std::abs(dv_wigner(rho0, iv({1, 0}), 2) - 0.5) < 1e-12);
    CHECK(std::abs(dv_wigner(rho0, iv({0, 1}), 2)) < 1e-12);
    CHECK(std::abs(dv_wigner(rho0, iv({1, 1}), 2)) < 1e-12);
    std::mt19937_64 rng(5);
    for (Int d = 2; d <= 5; ++d) {
        CM rho = random_density(d, rng);
        cd total = 0;
        for (Int q = 0; q < d; ++q)
            for (Int p = 0; p < d; ++p) total += dv_wigner(rho, iv({q, p}), d);
        CHECK(std::abs(total - 1.0) < 1e-12);
        CHECK(std::abs(dv_characteristic(rho, iv({0, 0}), d) - 1.0 / double(d)) < 1e-12);
        // W_ρ(u + v) = W_{DρD†}(u)
        IVec v = iv({1, d - 1});
        CM D = weyl_operator(v, d);
        CM moved = D * rho * D.adjoint();
        double cov = 0;
        for (Int q = 0; q < d; ++q)
            for (Int p = 0; p < d; ++p)
                cov = std::max(cov, std::abs(dv_wigner(rho, IVec(iv({q, p}) + v), d) - dv_wigner(moved, iv({q, p}), d)));
        CHECK(cov < 1e-12);
    }
    CHECK_THROWS_AS(dv_wigner(CM::Identity(4, 4) / 4.0, iv({0, 0, 0, 0}), 2), Error);
}
