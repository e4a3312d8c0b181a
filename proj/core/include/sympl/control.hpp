#pragma once

#include <vector>

#include "sympl/core.hpp"

namespace sympl::control {

// Per-mode 2×2 symplectic blocks.
struct LocalSymplectic {
    std::vector<Mat> blocks;
    int n_modes() const { return int(blocks.size()); }
    Mat matrix() const;
};
LocalSymplectic local_identity(int n_modes);
LocalSymplectic make_local(const std::vector<Mat>& blocks, double tol = 1e-11);

// L u = c v, blockwise. Blocks of u and v must be both zero or both nonzero.
LocalSymplectic local_connector(const Vec& u, const Vec& v, double c = 1.0);

// L such that Sl L Sr has entry (2a, 2b+1) = 1/c, (2a+1, 2b) = -c and
// zeros elsewhere on row 2a and column 2b.
LocalSymplectic sandwich_pair(const Mat& Sl, const Mat& Sr, int a, int b, double c = 1.0);
// L such that Q L P maps E_b into E_a (and E_a^ω into E_b^ω), with mode m
// acting as the pivot. Q, P must already have the sandwich_pair structure.
LocalSymplectic sandwich_pivot(const Mat& Q, const Mat& P, int a, int b, int m);

// Largest entry of M coupling E_b to modes other than a, or a to modes other than b.
double off_block(const Mat& M, int a, int b);

// S_a L3 S_b L2 S_c L1 S_d with E_b -> E_a.
struct SandwichResult {
    LocalSymplectic L1, L2, L3;
    Mat S;
    int pivot = 0;
    double residual = 0.0;  // off_block(S, a, b)
};
SandwichResult sandwich_transduce(const Mat& S_a, const Mat& S_b, const Mat& S_c, const Mat& S_d,
                                  int a, int b);
// Decouples mode a.
SandwichResult sandwich_decouple(const Mat& S_a, const Mat& S_b, const Mat& S_c, const Mat& S_d,
                                 int a = 0);

// Sixteen factors applied right to left: result = S[15] L[14] S[14] ... L[0] S[0].
struct SwapResult {
    std::vector<LocalSymplectic> L;
    Mat S;
    int j = 0, k = 0;
    double residual = 0.0;  // max of off_block(S, k, j), off_block(S, j, k)
};
SwapResult sandwich_swap(const std::vector<Mat>& S, int j, int k);
SwapResult sandwich_swap(const std::vector<Mat>& S);  // modes 0 and N-1
// Assembles the product for a given local schedule.
Mat assemble(const std::vector<Mat>& S, const std::vector<LocalSymplectic>& L);

// 0/1 matrix of nonvanishing 2×2 mode blocks.
using BoolMat = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;
struct SupportMap {
    BoolMat f;
    int n() const { return int(f.rows()); }
};
SupportMap support_map(const Mat& S, double support_tol = -1.0);  // default 1e-10·‖S‖_max
SupportMap make_support(const BoolMat& f);
BoolMat bool_product(const BoolMat& A, const BoolMat& B);
BoolMat bool_power(const BoolMat& A, int c);

// Bipartite components of a 0/1 matrix: column sets E^(l), row sets E'^(l),
// with the block of component l mapping cols[l] to rows[l].
struct BlockDecomposition {
    std::vector<std::vector<int>> cols, rows;
};
BlockDecomposition block_decomposition(const BoolMat& f);

using Permutation = std::vector<int>;
struct Stabilization {
    int c = 0, d = 0;
    BoolMat f_c;                               // f(S^c)
    std::vector<std::vector<int>> summands;     // E^(l) as mode lists
    std::vector<int> summand_of;                // mode -> l
    std::vector<Permutation> permutations;      // P_{S^n} on summands, n = c..d
};
Stabilization stabilize(const SupportMap& f);
Stabilization stabilize(const Mat& S);

struct SwapCertificate {
    bool swappable = false;
    int summand = -1;  // shared summand, if any
    int power = -1;    // n with P_{S^n} exchanging the summands, if any
};
SwapCertificate classify_swappable(const Stabilization& st, int j, int k);
SwapCertificate classify_swappable(const Mat& S, int j, int k);

Permutation identity_permutation(int n);
Permutation transposition(int n, int j, int k);
// (p ∘ q)(i) = p(q(i))
Permutation compose(const Permutation& p, const Permutation& q);
// Transpositions whose product (first applied first) equals p.
std::vector<std::pair<int, int>> transpositions(const Permutation& p);
// Support pattern of a mode permutation: entry (p(i), i) = 1.
BoolMat permutation_support(const Permutation& p);

}  // namespace sympl::control
