#pragma once

#include <array>
#include <vector>

#include "sympl/core.hpp"
#include "sympl/states.hpp"

namespace sympl::channels {

// x̄ -> T x̄ + d, V -> T V Tᵗ + N
struct GaussianChannel {
    Mat T;
    Mat N;
    Vec d;
};

GaussianChannel make_channel(const Mat& T, const Mat& N, const Vec& d = Vec());
GaussianChannel identity_channel(int n_modes);
GaussianChannel unitary_channel(const Mat& S, const Vec& d = Vec());

// smallest eigenvalue of N + iΩ' - iTΩTᵗ
double cp_margin(const GaussianChannel& c);
bool is_cp(const GaussianChannel& c, double tol = 1e-9);
// T with Gaussian entries (scale t_scale), N = AAᵗ + (λ + slack)·Id with λ lifting the CP margin to slack.
GaussianChannel random_cp_channel(int n_modes, std::uint64_t seed, double t_scale = 1.0, double slack = 0.1);

states::GaussianState apply(const GaussianChannel& c, const states::GaussianState& s);
// c2 ∘ c1
GaussianChannel compose(const GaussianChannel& c2, const GaussianChannel& c1);
GaussianChannel juxtapose(const GaussianChannel& c1, const GaussianChannel& c2);

// Modes [0, n_a) form system a, the rest the environment b.
GaussianChannel from_dilation(const Mat& S, int n_a, const Mat& V_b);

struct DilationResult {
    Mat S;        // symplectic on E_a ⊕ E_b
    Mat env_cov;  // V_b
    int n_a = 0;
    int n_b = 0;
    Mat M, M_s, M_a, R, L, S_prime;
};

// Requires det(Id - T) != 0 (SingularIdMinusT otherwise) and d = 0.
DilationResult dilate(const GaussianChannel& c);

// Dilates any channel with d = 0; when det(Id - T) = 0 the channel is split as
// outer ∘ inner with inner unitary. Stages are listed in application order.
struct DilationChain {
    std::vector<GaussianChannel> factors;
    std::vector<DilationResult> stages;
};
DilationChain dilate_chain(const GaussianChannel& c);

// Max-norm residuals of the three dilation block identities.
std::array<double, 3> dilation_block_residuals(const DilationResult& r);

struct CayleyDilation {
    Mat M_tilde;  // symmetric; cayley(Ω M_tilde) = D
    Mat D;        // (Id ⊕ S_b) S (Id ⊕ S_b')
    Mat A, B, C, Dblk;
    Mat env_cov;  // S_b'^{-1} V_b S_b'^{-t}
};
CayleyDilation dilation_cayley_form(const DilationResult& r, const Mat& S_b, const Mat& S_bp);

}  // namespace sympl::channels
