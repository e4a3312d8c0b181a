#pragma once

#include <array>

#include "sympl/core.hpp"

// Everything in this module uses the grouped ordering (q_1..q_N, p_1..p_N).
// The active formula acts on 4N sideband quadratures (Q_ω, P_ω, Q_-ω, P_-ω).
namespace sympl::scattering {

// H = Σ Y_jk a_j† a_k + ½ W_jk a_j† a_k† + h.c.
struct QuadraticHamiltonian {
    CMat Y;  // Hermitian
    CMat W;  // symmetric
    int n_modes() const { return int(Y.rows()); }
};
void validate(const QuadraticHamiltonian& H, double tol = 1e-9);

// (Im[Y+W], Re[Y-W]; -Re[Y+W], Im[Y-W])
Mat hamiltonian_generator(const CMat& Y, const CMat& W);
Mat hamiltonian_flow(const CMat& Y, const CMat& W, double t);

// Real quadrature form O⁻¹ X O of a 2N×2N matrix acting on (a, a†).
Mat mode_to_quadrature(const CMat& X, double tol = 1e-12);
// diag(d, d*) on (a, a†)
CMat diagonal_mode_matrix(const Eigen::VectorXcd& d);

struct ScatteringResult {
    Mat S;
    double residual = 0.0;  // ‖SᵗΩS - Ω‖_max for the relevant Ω
    bool symplectic = false;
};

// S = Id + D (Hm(Y) + ωΩ + B/2)⁻¹ C
ScatteringResult passive_scattering(const CMat& Y, const Mat& B, const Mat& C, const Mat& D,
                                    double omega, double tol = 1e-9);

// Normalized inputs of the active formula.
struct ActiveParameters {
    CMat Y, W;
    Mat Theta, Gamma;
};
// Y = 𝒞⁻¹𝒴𝒟⁻¹, W = 𝒞⁻¹𝒲𝒟⁻¹, Γ = 𝒞⁻¹ℬ𝒟⁻¹/2, Θ = ωℬ⁻¹ for diagonal couplings.
ActiveParameters normalize_active(const QuadraticHamiltonian& H, const Vec& B, const Vec& C,
                                  const Vec& D, double omega);

// S = Id - (Id⊗(ImY+Γ) - e1⊗ReW + e2⊗ImW - e1e2⊗ReY + e1e2e3⊗Θ)⁻¹
Mat active_assembly(const CMat& Y, const CMat& W, const Mat& Theta, const Mat& Gamma);
ScatteringResult active_scattering(const CMat& Y, const CMat& W, const Mat& Theta, const Mat& Gamma,
                                   double tol = 1e-9);
ScatteringResult active_scattering(const ActiveParameters& p, double tol = 1e-9);

// e1e2 ⊗ Id_N
Mat sideband_omega(int n_modes);
// At ω = 0 the two sidebands carry the same quadratures; returns the 2N×2N map.
Mat fold_sidebands(const Mat& S4, double tol = 1e-9);

struct Clifford {
    std::array<CMat, 3> eps;  // complex representation
    std::array<Mat, 3> e;     // real representation
    CMat U;                   // e_k = U⁻¹ ε_k U
};
Clifford clifford_basis();

// M̃ with ΩM̃ + Id/2 = (Id - S)⁻¹
struct CayleyHamiltonian {
    Mat M;
    double asymmetry = 0.0;  // ‖M̃ - M̃ᵗ‖_max before symmetrizing
};
CayleyHamiltonian cayley_hamiltonian(const Mat& S, const Mat& Omega);
CayleyHamiltonian cayley_hamiltonian(const Mat& S);  // grouped Ω

// Two-mode examples from the coupled-cavity model, relabeled to the
// transduction convention: interleaved, transmitted port first.
// χ = 4g²/(κ1κ2) in terms of the Langevin coupling.
Mat passive_two_mode(double chi, double kappa1 = 1.0, double kappa2 = 1.0);
Mat active_two_mode(double chi, double kappa1 = 1.0, double kappa2 = 1.0);
// Output-port exchange followed by the grouped → interleaved change.
Mat to_transduction_labels(const Mat& S_grouped);

}  // namespace sympl::scattering
