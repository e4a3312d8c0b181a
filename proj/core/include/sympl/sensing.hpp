#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sympl/core.hpp"
#include "sympl/states.hpp"

namespace sympl::sensing {

// Linear-response probe: G_θ = D(θ)^{-1}, all matrices interleaved.
//   x̄_out = (Id - G) x̄_in,  V_out = (Id - G) V_in (Id - G)ᵗ + G R V_env Rᵗ Gᵗ
struct ProbeModel {
    std::function<Mat(double)> denominator;
    std::function<Mat(double)> d_denominator;  // optional; finite differences otherwise
    Mat R;
    Mat V_env;
    states::GaussianState input;
    std::string name;

    Mat G(double theta) const;
};

// D(θ) = θ Π - M
ProbeModel linear_response_model(const Mat& Pi, const Mat& M, const Mat& R, const Mat& V_env,
                                 const states::GaussianState& input, std::string name = "linear");

// Displayed: G_θ = (κ/2g) A(θ)^{-1} as printed (not a CP channel with vacuum noise).
// Physical: G_θ = -(κ/g) A(-θκ/g)^{-1}, from the Langevin equation; CP with vacuum noise.
enum class EPNormalization { Displayed, Physical };

// Two-mode model (grouped in the display, converted here).
// strict: require g = (η1+κ)/2 = (η2-κ)/2.
ProbeModel ep_two_mode_model(double kappa, double g, double eta1, double eta2,
                             const states::GaussianState& input, bool strict = true,
                             EPNormalization norm = EPNormalization::Displayed);
ProbeModel ep_two_mode_model(double kappa, double g, const states::GaussianState& input);
// Same Π, but the unperturbed part has only trivial Jordan blocks at zero.
ProbeModel diagonalizable_control_model(double kappa, double g, const states::GaussianState& input);
// Unperturbed part invertible: no pole at θ = 0, Fisher information flat near zero.
ProbeModel off_resonance_model(double kappa, double g, const states::GaussianState& input);

// Standard coherent probe used by the CLI and tests: x̄ = (1,0,1,0,...), vacuum noise.
states::GaussianState default_probe(int n_modes);

states::GaussianState output_state(const ProbeModel& m, double theta);

struct OutputDerivative {
    states::GaussianState state;
    Vec dx;
    Mat dV;
    bool analytic = true;
};
OutputDerivative output_derivative(const ProbeModel& m, double theta);

struct ClassicalFisher {
    double I_mu = 0, I_sigma = 0;
    double total() const { return I_mu + I_sigma; }
};
ClassicalFisher classical_fisher(const Vec& mu, const Mat& Sigma, const Vec& dmu, const Mat& dSigma);
// heterodyne on every mode: μ = x̄, Σ = V + Id
ClassicalFisher heterodyne_fisher(const Vec& dx, const Mat& V, const Mat& dV);

enum class PhiMethod { Exact, Approximate, Auto };
struct QuantumFisher {
    double QFI_xbar = 0, QFI_V = 0;
    Mat Phi;
    double residual = 0;  // ‖VΦV - ΩΦΩᵗ - dV‖_max / max(1, ‖dV‖_max)
    bool approx_used = false;
    double total() const { return QFI_xbar + QFI_V; }
};
inline constexpr double kApproxThreshold = 1e6;
QuantumFisher quantum_fisher(const Mat& V, const Vec& dx, const Mat& dV,
                             PhiMethod method = PhiMethod::Exact,
                             double approx_threshold = kApproxThreshold);
// dV = VΦV - ΩΦΩᵗ, min-norm solution
Mat solve_phi(const Mat& V, const Mat& dV);

struct FisherResult {
    double theta = 0;
    double I_mu = 0, I_sigma = 0, QFI_xbar = 0, QFI_V = 0;
    bool approx_used = false;
};
FisherResult fisher(const ProbeModel& m, double theta, PhiMethod method = PhiMethod::Exact);

enum class Quantity { QFI_xbar, QFI_V, I_mu, I_sigma };
double quantity(const FisherResult& r, Quantity q);
Quantity quantity_from_string(const std::string& s);

struct SlopeFit {
    double slope = 0, stderr_ = 0, intercept = 0;
};
SlopeFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);
SlopeFit scaling_exponent(const ProbeModel& m, const std::vector<double>& theta_grid, Quantity q);
std::vector<double> log_grid(double lo, double hi, int points);

// W_θ = S_θ^{-1} dS_θ/dθ by central differences with Richardson refinement.
Mat sensitivity_matrix(const std::function<Mat(double)>& S_of_theta, double theta, double h = -1.0);
struct CayleySensitivity {
    Mat W;
    double sigma_min_minus = 0;  // smallest singular value of ΩM - Id/2
    double sigma_min_plus = 0;   // smallest singular value of ΩM + Id/2
};
// S_θ = Id - (ΩM_θ + Id/2)^{-1}; raises SingularFactor when a factor is singular.
CayleySensitivity sensitivity_cayley(const Mat& M, const Mat& dM, double tol = 1e-12);

}  // namespace sympl::sensing
