#pragma once

#include <complex>
#include <variant>
#include <vector>

#include "sympl/core.hpp"

namespace sympl::states {

struct GaussianState {
    Vec x_bar;
    Mat V;
    ModeOrdering ordering = ModeOrdering::Interleaved;

    int n_modes() const { return int(x_bar.size() / 2); }
};

GaussianState make_state(const Vec& x_bar, const Mat& V);
GaussianState vacuum(int n);
GaussianState coherent(const Vec& u);
GaussianState thermal(const std::vector<double>& nbar);
// V = diag(e^{-2ξ}, e^{2ξ}) per mode
GaussianState squeezed_vacuum(const std::vector<double>& xi);
GaussianState two_mode_squeezed(double r);

// smallest eigenvalue of V + iΩ
double physicality_margin(const GaussianState& s);
bool is_physical(const GaussianState& s, double tol = 1e-8);

GaussianState apply_gaussian_unitary(const GaussianState& s, const Mat& S, const Vec& shift);
GaussianState apply_gaussian_unitary(const GaussianState& s, const Mat& S);

double wigner_eval(const GaussianState& s, const Vec& u);
std::complex<double> characteristic_eval(const GaussianState& s, const Vec& v);

GaussianState tensor(const GaussianState& a, const GaussianState& b);
// keep: 0-based mode indices, in output order
GaussianState partial_trace(const GaussianState& s, const std::vector<int>& keep);

// Ideal homodyne projector Π_l(η): plane is Lagrangian inside the measured modes.
struct InfSqueezedProjector {
    SubspaceBasis plane;
    Vec eta;
};

struct ConditionalResult {
    double density = 0.0;  // probability density of the outcome
    GaussianState state;   // conditional state of the unmeasured modes
};

// Ideal homodyne on `measured` modes: plane is 2m×m (m = measured.size()), Euclidean-orthonormal.
ConditionalResult condition_on_homodyne(const GaussianState& s, const std::vector<int>& measured,
                                        const SubspaceBasis& plane, const Vec& eta);
// General-dyne with POVM elements ρ(outcome, povm_cov) on the measured modes.
ConditionalResult condition_on_general_dyne(const GaussianState& s,
                                            const std::vector<int>& measured,
                                            const Mat& povm_cov, const Vec& outcome);

// Measurement models.
struct IdealHomodyne {
    SubspaceBasis plane;
};
struct IdealHeterodyne {};
// Mix the measured modes with `env` through `mix` (ordered measured ⊕ env), then
// homodyne along `plane` on the combined modes.
struct GeneralDyne {
    Mat mix;
    GaussianState env;
    SubspaceBasis plane;
};
using MeasurementSpec = std::variant<IdealHomodyne, IdealHeterodyne, GeneralDyne>;

ConditionalResult measure(const GaussianState& s, const std::vector<int>& measured,
                          const MeasurementSpec& spec, const Vec& outcome);

// H(τ) on (signal, env) with m modes each: blocks [[√(1-τ), √τ], [-√τ, √(1-τ)]].
Mat beamsplitter_h(double tau, int m = 1);

// Squeeze the Lagrangian plane by ζ: covariance along the plane scales as ζ².
GaussianState approx_inf_squeezed(const GaussianState& s, const SubspaceBasis& plane, double zeta);
Mat plane_squeezer(const SubspaceBasis& plane, double zeta);

}  // namespace sympl::states
