#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sympl/core.hpp"

// Exact arithmetic over ℤ/dℤ. Phase-space labels u = (q_1, p_1, ..., q_N, p_N)
// index D(u) = ⊗ Z^{q_j} X^{p_j}; σ(u, v) = Σ q_j v_{p_j} - p_j v_{q_j}.
namespace sympl::discrete {

using Int = std::int64_t;
using IMat = Eigen::Matrix<Int, Eigen::Dynamic, Eigen::Dynamic>;
using IVec = Eigen::Matrix<Int, Eigen::Dynamic, 1>;

struct ModVec {
    IVec v;
    Int d = 2;
};

Int mod(Int a, Int d);
IMat reduce(const IMat& A, Int d);
IVec reduce(const IVec& v, Int d);
IMat mul(const IMat& A, const IMat& B, Int d);
IMat identity(int n);
IMat direct_sum(const IMat& A, const IMat& B);
bool equal_mod(const IMat& A, const IMat& B, Int d);
bool is_prime(Int n);

// Matrix of σ: σ(u, v) = uᵗ J v. Interleaved J = ⊕[[0,1],[-1,0]].
IMat dv_form(int n_modes, Int d, ModeOrdering ordering = ModeOrdering::Interleaved);
Int pauli_phase(const IVec& u, const IVec& v, Int d);
Int pauli_phase(const ModVec& u, const ModVec& v);

// Gauss-Jordan over ℤ/dℤ (per CRT factor, unit pivots); raises NonInvertibleBlock.
IMat inverse_mod(const IMat& A, Int d);
// -J Sᵗ J
IMat symplectic_inverse(const IMat& S, Int d);

// ---- Chinese remainder ----
struct CRTRep {
    Int d = 0;
    std::vector<Int> primes;
    std::vector<int> powers;
    std::vector<Int> moduli;  // primes^powers, pairwise coprime
};
CRTRep crt_split(Int d);
std::vector<Int> crt_components(Int x, const CRTRep& rep);
Int crt_combine(const std::vector<Int>& residues, const CRTRep& rep);

// ---- 𝔽_p[x]/(xʳ) ----
// Coefficients a_0..a_{r-1}; the integer Σ a_j p^j maps to Σ a_j x^j.
struct LocalRingElement {
    Int p = 2;
    int r = 1;
    std::vector<Int> a;
};
using Poly = std::vector<Int>;  // coefficients in 𝔽_p, untruncated

LocalRingElement to_local(Int x, Int p, int r);
Int from_local(const LocalRingElement& b);
LocalRingElement local_mul(const LocalRingElement& a, const LocalRingElement& b);
LocalRingElement local_add(const LocalRingElement& a, const LocalRingElement& b);
// l-th formal differential (coefficient of dx^l) of b, truncated to degree < r.
LocalRingElement ring_diff(const LocalRingElement& b, int l);
// Same, for a polynomial computed in 𝔽_p[x] before truncation.
LocalRingElement ring_diff(const Poly& f, Int p, int r, int l);
Poly poly_mul(const Poly& a, const Poly& b, Int p);
Poly poly_add(const Poly& a, const Poly& b, Int p);

// ---- symplectic membership ----
struct FactorReport {
    Int modulus = 0;
    Int p = 0;
    int r = 0;
    bool ok = false;
    int failed_l = -1;  // first differential order that fails
    int i = -1, j = -1; // first failing basis pair
};
struct DVReport {
    bool ok = false;
    std::vector<FactorReport> factors;
};
// Bᵗ J_src B against J_dst, componentwise over the CRT factors with the
// differential conditions on prime-power factors.
DVReport form_check(const IMat& B, const IMat& J_src, const IMat& J_dst, Int d);
DVReport dv_symplectic_report(const IMat& S, Int d, ModeOrdering ordering = ModeOrdering::Interleaved);
bool is_dv_symplectic(const IMat& S, Int d, ModeOrdering ordering = ModeOrdering::Interleaved);
// Plain congruence SᵗJS ≡ J (mod d).
bool is_symplectic_congruence(const IMat& S, Int d, ModeOrdering ordering = ModeOrdering::Interleaved);

// vectors = e_1..e_N, f_1..f_N (labels in the given ordering)
struct BasisCheck {
    bool ok = false;
    IMat gram;  // σ(b_i, b_j) mod d
    DVReport report;
};
BasisCheck dv_symplectic_basis_check(const std::vector<IVec>& vectors, Int d,
                                     ModeOrdering ordering = ModeOrdering::Interleaved);

// ---- Clifford gates ----
// Convention: U D(v) U† ∝ D(Sᵗ v).
struct Gate {
    enum class Kind { H, CNOT, Phase, Custom };
    Kind kind = Kind::H;
    int a = 0, b = 0;           // qudit, or control/target
    std::vector<IVec> images;   // Custom: image label of each generator e_k
};
Gate hadamard(int q);
Gate cnot(int control, int target);
Gate phase(int q);
Gate custom_gate(std::vector<IVec> images);
Gate gate_from_string(const std::string& name, const std::vector<int>& qudits);

IMat gate_to_symplectic(const Gate& g, int n_qudits, Int d = 2);
// Listed order: S = S_{g1} S_{g2} ... (first gate applied first).
IMat circuit_compose(const std::vector<Gate>& gates, int n_qudits, Int d = 2);
IMat circuit_compose(const std::vector<IMat>& factors, Int d);

// Coordinate index sets into the label vector.
struct DVPartition {
    std::vector<int> in, out, h, z;
};
IMat block(const IMat& S, const std::vector<int>& rows, const std::vector<int>& cols);
struct DVTeleport {
    IMat S_tilde;  // S_out,in - S_out,z (S_h,z)⁻¹ S_h,in
    IMat F_star;   // S_out,z (S_h,z)⁻¹
};
DVTeleport dv_teleport_transform(const IMat& S, const DVPartition& p, Int d = 2);

// Correction label F⋆ s for a syndrome s.
IVec feedforward(const IMat& F_star, const IVec& syndrome, Int d = 2);
// "Z", "X", "ZX", "Z^2X", ... per qudit, "I" for identity, joined by spaces.
std::string pauli_string(const IVec& u, Int d = 2);

// ---- phase-space functions ----
// Dense D(u) on (ℂ^d)^⊗N, basis |j⟩ with Z|j⟩ = ω^j|j⟩, X|j⟩ = |j+1⟩, ω = e^{2πi/d}.
CMat weyl_operator(const IVec& u, Int d);
// Single qudit only: χ(u) = Tr[D(-u)ρ]/d, W(u) = Σ_v ω^{σ(u,v)} χ(v) / d.
std::complex<double> dv_characteristic(const CMat& rho, const IVec& u, Int d);
std::complex<double> dv_wigner(const CMat& rho, const IVec& u, Int d);

// Worked examples.
std::vector<Gate> teleportation_circuit();
DVPartition teleportation_partition();
std::vector<Gate> gate_teleportation_circuit();
DVPartition gate_teleportation_partition();

}  // namespace sympl::discrete
