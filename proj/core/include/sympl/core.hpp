#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sympl/errors.hpp"

namespace sympl {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;

enum class ModeOrdering { Interleaved, Grouped };

const char* to_string(ModeOrdering o);
ModeOrdering ordering_from_string(const std::string& s);

struct SymplecticForm {
    int n_modes = 0;
    ModeOrdering ordering = ModeOrdering::Interleaved;
    Mat matrix;
};

SymplecticForm omega(int n_modes, ModeOrdering ordering = ModeOrdering::Interleaved);
Mat omega_matrix(int n_modes, ModeOrdering ordering = ModeOrdering::Interleaved);

// P with x_interleaved = P * x_grouped.
Mat ordering_permutation(int n_modes);
Mat to_grouped(const Mat& interleaved);
Mat to_interleaved(const Mat& grouped);
Vec to_grouped_vec(const Vec& interleaved);
Vec to_interleaved_vec(const Vec& grouped);

int modes_of(const Mat& S);  // rows/2, throws on odd or non-square

double symplectic_residual(const Mat& S, ModeOrdering ordering = ModeOrdering::Interleaved);
bool is_symplectic(const Mat& S, double tol = 1e-9,
                   ModeOrdering ordering = ModeOrdering::Interleaved);
// M Ω + Ω Mᵗ = 0
bool is_sp_algebra(const Mat& M, double tol = 1e-9,
                   ModeOrdering ordering = ModeOrdering::Interleaved);

Mat direct_sum(const Mat& A, const Mat& B);
Mat symmetrize(const Mat& A);

// e^{ΩHt}
Mat exp_map(const Mat& H, double t, double tol = 1e-9);

// S = Id - (M + Id/2)^{-1}
Mat cayley(const Mat& M);
// inverse map: M = (Id - S)^{-1} - Id/2
Mat cayley_generator(const Mat& S);

Mat inverse(const Mat& S, ModeOrdering ordering = ModeOrdering::Interleaved);

struct EulerDecomposition {
    Mat R, Z, Rp;  // S = R Z Rp
    Vec squeeze;   // z_j >= 1, one per mode
};
EulerDecomposition euler_decompose(const Mat& S);

// Grouped ordering throughout.
struct PreIwasawa {
    Mat P, L, V, W;
    Mat lower, scale, ortho;  // S = lower * scale * ortho
};
PreIwasawa pre_iwasawa(const Mat& S_grouped);

struct SkewCanonical {
    Mat K;       // orthogonal, columns (v_1, w_1, v_2, w_2, ..., kernel...)
    Vec lambda;  // A v_j = λ_j w_j, A w_j = -λ_j v_j; λ descending
};
// Real skew-symmetric A: Kᵗ A K = ⊕ [[0,-λ],[λ,0]] ⊕ 0.
SkewCanonical skew_canonical(const Mat& A, double rel_tol = 1e-12);

struct WilliamsonResult {
    Mat S;   // S V Sᵗ = diag(ν1,ν1,ν2,ν2,...)
    Vec nu;  // ascending
};
WilliamsonResult williamson(const Mat& V);
Vec symplectic_eigenvalues(const Mat& V);

struct SymplecticSVD {
    Mat S;       // 2m×2m symplectic
    Mat embed;   // 2m×n 0/1 placement of Λ
    Vec lambda;  // positive
    Mat Q;       // n×n orthogonal
    // M = S * embed * diag(lambda) * Q
};
SymplecticSVD symplectic_svd(const Mat& M);

// Extend σ-orthonormal pairs (e_i, f_i) with eᵗΩf = -1 and isotropic vectors c_k
// (σ-orthogonal to the pairs) to a full symplectic basis.
// Returns B with columns interleaved (q-like, p-like): pairs first as (e_i,f_i),
// then (c_k, d_k), then the remaining complement.
Mat symplectic_completion(const Mat& E, const Mat& F, const Mat& C);

Mat random_symplectic(int n_modes, std::uint64_t seed, double squeeze_bound);
Mat random_orthosymplectic(int n_modes, std::uint64_t seed);

enum class SubspaceKind { Isotropic, Lagrangian, Symplectic, General };

struct SubspaceBasis {
    Mat F;
    SubspaceKind kind = SubspaceKind::General;
};

SubspaceKind classify_subspace(const Mat& F, double tol = 1e-9);
SubspaceBasis make_subspace(const Mat& F, double tol = 1e-9);
// Span of coordinate axes (0-based indices into the 2N coordinates).
SubspaceBasis coordinate_subspace(int n_modes, const std::vector<int>& coords);
// Whole phase space of the listed modes (0-based).
SubspaceBasis mode_subspace(int n_modes, const std::vector<int>& modes);
// Conjugate plane l' = Ω F for an orthonormal Lagrangian basis.
SubspaceBasis conjugate_plane(const SubspaceBasis& l);

Mat submatrix(const Mat& S, const SubspaceBasis& rows, const SubspaceBasis& cols);

}  // namespace sympl
