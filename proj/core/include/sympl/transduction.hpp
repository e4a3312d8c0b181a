#pragma once

#include <optional>
#include <vector>

#include "sympl/channels.hpp"
#include "sympl/core.hpp"

namespace sympl::transduction {

// Mode split E = E_in ⊕ E_anc = E_out ⊕ E_idl. Planes are given in the local
// coordinates of their block (rows: 2·|anc| resp. 2·|idl|, modes in listed order).
struct PartitionSpec {
    int n_modes = 0;
    std::vector<int> in_modes, anc_modes, out_modes, idl_modes;
    Mat l_z;  // Lagrangian plane in E_anc (squeezed quadratures)
    Mat l_h;  // Lagrangian plane in E_idl (measured quadratures)
};

// mode 0 = in/out, the rest anc/idl, planes spanned by the q-quadratures
PartitionSpec default_partition(int n_modes);
void validate(const PartitionSpec& p);

// Full-space bases of the named subspaces.
struct PartitionBases {
    SubspaceBasis in, out, anc, idl, z, zp, h, hp;
};
PartitionBases bases(const PartitionSpec& p);

struct TeleportResult {
    Mat S_tilde;  // S_{out,in} - S_{out,z'} (S_{h,z'})^{-1} S_{h,in}
    Mat S_check;  // inverse of S_tilde, from the blocks of S^{-1}
    Mat F;        // -S_{out,z'} (S_{h,z'})^{-1}
    Mat B;        // -(S^{-1})_{in,h'} ((S^{-1})_{z,h'})^{-1}
    Mat F_identity_rhs;
    Mat B_identity_rhs;
    double condition = 0.0;  // of S_{h,z'}
};
TeleportResult teleport_transform(const Mat& S, const PartitionSpec& p);

struct TeleportResiduals {
    double symplectic_tilde = 0, symplectic_check = 0, inverse = 0, F_identity = 0, B_identity = 0;
    double max() const;
};
TeleportResiduals teleport_residuals(const Mat& S, const PartitionSpec& p);

struct Imperfections {
    double nu = 0.0;  // ancillary
    double mu = 0.0;  // measurement
    // raw parameters; when absent they are chosen as n_z = n_h = 0
    std::optional<double> xi, n_z, tau, n_h;
};
Imperfections from_raw(double xi, double n_z, double tau, double n_h);
struct RawImperfections {
    double xi, n_z, tau, n_h;
};
RawImperfections resolve_raw(const Imperfections& c);

// 𝒢_{Id, N'} after S̃^{-1} post-processing.
channels::GaussianChannel adaptive_channel(const Mat& S, const PartitionSpec& p,
                                           const Imperfections& c);
// Same channel estimated by moment propagation through S, H̃(τ) and A_F.
channels::GaussianChannel simulate_adaptive(const Mat& S, const PartitionSpec& p,
                                            const Imperfections& c);
// A_F on (out, h, h') with Ω_{h',h} = Id.
Mat feedforward_matrix(const Mat& F);

// 𝒢_{T,N} with T = S_{out,in}, N = S_{out,anc} S_{out,anc}ᵗ (vacuum ancilla).
channels::GaussianChannel direct_channel(const Mat& S, const PartitionSpec& p);
// Post-processed by 𝒢_{T^{-1}, N'}: returns 𝒢_{Id, T^{-1} N T^{-t} + N'}.
channels::GaussianChannel direct_channel(const Mat& S, const PartitionSpec& p, const Mat& N_post);
// Single mode: N' chosen to maximize the average fidelity subject to complete positivity.
channels::GaussianChannel direct_channel_optimized(const Mat& S, const PartitionSpec& p);
Mat optimal_post_noise(const channels::GaussianChannel& direct);

double average_fidelity(const channels::GaussianChannel& c, double tol = 1e-9);

Mat passive_example(double C);
Mat active_example(double C);
double passive_t(double C);
double passive_r(double C);
double active_t(double C);
double active_r(double C);
// C reproducing a given transmission t² (passive: C >= 1 branch; active: C < 1 branch)
double passive_C_from_t2(double t2);
double active_C_from_t2(double t2);

double passive_adaptive_fidelity(double t2, double mu, double nu);

}  // namespace sympl::transduction
