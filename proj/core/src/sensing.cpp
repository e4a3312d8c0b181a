#include "sympl/sensing.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace sympl::sensing {

using states::GaussianState;

namespace {

Mat ep_block(double theta) {
    Mat A(4, 4);
    A << -1, 0, -theta, 1,
         0, 1, 1, -theta,
         theta, -1, -1, 0,
         -1, theta, 0, 1;
    return A;
}

Mat ep_R(double kappa, double eta1, double eta2) {
    Vec d(4);
    d << std::sqrt(eta1 / kappa), -std::sqrt(eta2 / kappa), std::sqrt(eta1 / kappa), std::sqrt(eta2 / kappa);
    return to_interleaved(Mat(d.asDiagonal()));
}

void check_positive(double x, const char* what) {
    if (!(x > 0.0)) fail("InvalidParameter", std::string(what) + " must be positive");
}

// central difference refined by one Richardson step
Mat derivative(const std::function<Mat(double)>& f, double x, double h) {
    if (h <= 0) h = 1e-6 * std::max(1.0, std::abs(x));
    Mat d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    Mat d2 = (f(x + h / 2) - f(x - h / 2)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

double max_abs(const Mat& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

Mat ProbeModel::G(double theta) const {
    if (!denominator) fail("InvalidParameter", "probe model has no response");
    Mat D = denominator(theta);
    Eigen::ComplexEigenSolver<Mat> es(D, false);
    double lo = es.eigenvalues().cwiseAbs().minCoeff();
    if (!(lo >= 1e-8)) fail("SingularResponse", "response denominator is singular at theta = " + std::to_string(theta));
    return D.partialPivLu().inverse();
}

ProbeModel linear_response_model(const Mat& Pi, const Mat& M, const Mat& R, const Mat& V_env,
                                 const GaussianState& input, std::string name) {
    const Eigen::Index d = Pi.rows();
    if (Pi.cols() != d || M.rows() != d || M.cols() != d || R.rows() != d || d % 2)
        fail("DimensionMismatch", "Pi, M and R must be square of the same even size");
    if (V_env.rows() != R.cols() || V_env.cols() != R.cols())
        fail("DimensionMismatch", "V_env must match the columns of R");
    if (input.V.rows() != d) fail("DimensionMismatch", "input state must match the model");
    if (Pi.fullPivLu().rank() < d) fail("InvalidParameter", "Pi must have full rank");
    ProbeModel m;
    m.denominator = [Pi, M](double t) { return Mat(t * Pi - M); };
    m.d_denominator = [Pi](double) { return Pi; };
    m.R = R;
    m.V_env = V_env;
    m.input = input;
    m.name = std::move(name);
    return m;
}

ProbeModel ep_two_mode_model(double kappa, double g, double eta1, double eta2,
                             const GaussianState& input, bool strict, EPNormalization norm) {
    check_positive(kappa, "kappa");
    check_positive(g, "g");
    if (eta1 < 0 || eta2 < 0) fail("InvalidParameter", "loss and gain rates must be >= 0");
    if (strict) {
        const double tol = 1e-12 * std::max(1.0, g);
        if (std::abs(g - (eta1 + kappa) / 2) > tol || std::abs(g - (eta2 - kappa) / 2) > tol)
            fail("EPConditionViolated", "need g = (eta1 + kappa)/2 = (eta2 - kappa)/2");
    }
    if (norm == EPNormalization::Physical && !strict)
        fail("InvalidParameter", "the physical normalization holds at the EP only");
    // D(θ) = θ Π - M in grouped ordering; A(θ) = A(0) + θ Ω
    Mat Pi, M;
    if (norm == EPNormalization::Displayed) {
        const double s = 2.0 * g / kappa;
        Pi = s * omega_matrix(2, ModeOrdering::Grouped);
        M = -s * ep_block(0.0);
    } else {
        Pi = omega_matrix(2, ModeOrdering::Grouped);
        M = (g / kappa) * ep_block(0.0);
    }
    return linear_response_model(to_interleaved(Pi), to_interleaved(M), ep_R(kappa, eta1, eta2),
                                 Mat::Identity(4, 4), input, "ep");
}

ProbeModel ep_two_mode_model(double kappa, double g, const GaussianState& input) {
    return ep_two_mode_model(kappa, g, 2 * g - kappa, 2 * g + kappa, input, true);
}

ProbeModel diagonalizable_control_model(double kappa, double g, const GaussianState& input) {
    check_positive(kappa, "kappa");
    check_positive(g, "g");
    if (2 * g < kappa) fail("InvalidParameter", "need 2g >= kappa");
    const double s = 2.0 * g / kappa;
    Mat Pi = s * omega_matrix(2, ModeOrdering::Grouped);
    // mode 1 sits at a simple zero, mode 2 is off resonance
    Vec d(4);
    d << 0, 1, 0, 1;
    Mat M = -s * Mat(d.asDiagonal());
    return linear_response_model(to_interleaved(Pi), to_interleaved(M), ep_R(kappa, 2 * g - kappa, 2 * g + kappa),
                                 Mat::Identity(4, 4), input, "diagonalizable");
}

ProbeModel off_resonance_model(double kappa, double g, const GaussianState& input) {
    check_positive(kappa, "kappa");
    check_positive(g, "g");
    if (2 * g < kappa) fail("InvalidParameter", "need 2g >= kappa");
    const double s = 2.0 * g / kappa;
    Mat Pi = s * omega_matrix(2, ModeOrdering::Grouped);
    return linear_response_model(to_interleaved(Pi), -s * Mat::Identity(4, 4),
                                 ep_R(kappa, 2 * g - kappa, 2 * g + kappa), Mat::Identity(4, 4), input,
                                 "off_resonance");
}

GaussianState default_probe(int n) {
    Vec x = Vec::Zero(2 * n);
    for (int j = 0; j < n; ++j) x(2 * j) = 1.0;
    return states::coherent(x);
}

GaussianState output_state(const ProbeModel& m, double theta) {
    const Mat G = m.G(theta);
    const Eigen::Index d = G.rows();
    const Mat T = Mat::Identity(d, d) - G;
    const Mat GR = G * m.R;
    return states::make_state(T * m.input.x_bar,
                              symmetrize(T * m.input.V * T.transpose() + GR * m.V_env * GR.transpose()));
}

OutputDerivative output_derivative(const ProbeModel& m, double theta) {
    OutputDerivative o;
    o.state = output_state(m, theta);
    const Mat G = m.G(theta);
    const Eigen::Index d = G.rows();
    Mat dD;
    if (m.d_denominator) {
        dD = m.d_denominator(theta);
    } else {
        dD = derivative(m.denominator, theta, -1.0);
        o.analytic = false;
    }
    const Mat dG = -G * dD * G;
    const Mat T = Mat::Identity(d, d) - G;
    const Mat N = m.R * m.V_env * m.R.transpose();
    o.dx = -dG * m.input.x_bar;
    const Mat a = -dG * m.input.V * T.transpose();
    const Mat b = dG * N * G.transpose();
    o.dV = a + a.transpose() + b + b.transpose();
    return o;
}

ClassicalFisher classical_fisher(const Vec& mu, const Mat& Sigma, const Vec& dmu, const Mat& dSigma) {
    if (mu.size() != Sigma.rows() || dmu.size() != mu.size() || dSigma.rows() != Sigma.rows())
        fail("DimensionMismatch", "moments and derivatives disagree in size");
    Eigen::LLT<Mat> llt(symmetrize(Sigma));
    if (llt.info() != Eigen::Success) fail("SingularSigma", "Sigma is not positive definite");
    ClassicalFisher f;
    f.I_mu = dmu.dot(llt.solve(dmu));
    const Mat A = llt.solve(dSigma);
    f.I_sigma = 0.5 * (A * A).trace();
    return f;
}

ClassicalFisher heterodyne_fisher(const Vec& dx, const Mat& V, const Mat& dV) {
    const Eigen::Index d = V.rows();
    return classical_fisher(Vec::Zero(d), V + Mat::Identity(d, d), dx, dV);
}

Mat solve_phi(const Mat& V, const Mat& dV) {
    const int n = modes_of(V);
    const WilliamsonResult w = williamson(V);
    // in the Williamson frame the equation decouples into 2×2 blocks
    const Mat Y = w.S * symmetrize(dV) * w.S.transpose();
    Mat X = Mat::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const double s = w.nu(j) * w.nu(k);
            const double det = s * s - 1.0;
            const double y00 = Y(2 * j, 2 * k), y01 = Y(2 * j, 2 * k + 1);
            const double y10 = Y(2 * j + 1, 2 * k), y11 = Y(2 * j + 1, 2 * k + 1);
            double a, b, c, dd;
            if (std::abs(s - 1.0) > 1e-12) {
                // s a - d = y00, s d - a = y11; s b + c = y01, s c + b = y10
                a = (s * y00 + y11) / det;
                dd = (y00 + s * y11) / det;
                b = (s * y01 - y10) / det;
                c = (s * y10 - y01) / det;
            } else {
                // pure pair: min-norm solution
                a = (y00 - y11) / 4.0;
                dd = -a;
                b = (y01 + y10) / 4.0;
                c = b;
            }
            X(2 * j, 2 * k) = a;
            X(2 * j, 2 * k + 1) = b;
            X(2 * j + 1, 2 * k) = c;
            X(2 * j + 1, 2 * k + 1) = dd;
        }
    return symmetrize(w.S.transpose() * X * w.S);
}

QuantumFisher quantum_fisher(const Mat& V, const Vec& dx, const Mat& dV, PhiMethod method,
                             double approx_threshold) {
    const Eigen::Index d = V.rows();
    if (V.cols() != d || dx.size() != d || dV.rows() != d || dV.cols() != d)
        fail("DimensionMismatch", "moments and derivatives disagree in size");
    Eigen::LLT<Mat> llt(symmetrize(V));
    if (llt.info() != Eigen::Success) fail("SingularCovariance", "V is not positive definite");
    QuantumFisher q;
    q.QFI_xbar = dx.dot(llt.solve(dx));
    const Mat dVs = symmetrize(dV);
    if (max_abs(dVs) == 0.0) {
        q.Phi = Mat::Zero(d, d);
        return q;
    }
    bool approx = method == PhiMethod::Approximate;
    if (method == PhiMethod::Auto) approx = V.determinant() > approx_threshold;
    if (approx) {
        const Mat Vi = llt.solve(Mat::Identity(d, d));
        q.Phi = symmetrize(Vi * dVs * Vi);
        q.approx_used = true;
    } else {
        q.Phi = solve_phi(V, dVs);
    }
    const Mat O = omega_matrix(int(d / 2));
    q.residual = max_abs(V * q.Phi * V - O * q.Phi * O.transpose() - dVs) / std::max(1.0, max_abs(dVs));
    if (!approx && !(q.residual < 1e-6))
        fail("IllConditionedSolve", "Phi equation residual " + std::to_string(q.residual));
    q.QFI_V = 0.5 * (q.Phi * dVs).trace();
    return q;
}

FisherResult fisher(const ProbeModel& m, double theta, PhiMethod method) {
    const OutputDerivative o = output_derivative(m, theta);
    FisherResult r;
    r.theta = theta;
    const ClassicalFisher c = heterodyne_fisher(o.dx, o.state.V, o.dV);
    r.I_mu = c.I_mu;
    r.I_sigma = c.I_sigma;
    const QuantumFisher q = quantum_fisher(o.state.V, o.dx, o.dV, method);
    r.QFI_xbar = q.QFI_xbar;
    r.QFI_V = q.QFI_V;
    r.approx_used = q.approx_used;
    return r;
}

double quantity(const FisherResult& r, Quantity q) {
    switch (q) {
        case Quantity::QFI_xbar: return r.QFI_xbar;
        case Quantity::QFI_V: return r.QFI_V;
        case Quantity::I_mu: return r.I_mu;
        case Quantity::I_sigma: return r.I_sigma;
    }
    return 0.0;
}

Quantity quantity_from_string(const std::string& s) {
    if (s == "QFI_xbar") return Quantity::QFI_xbar;
    if (s == "QFI_V") return Quantity::QFI_V;
    if (s == "I_mu") return Quantity::I_mu;
    if (s == "I_sigma") return Quantity::I_sigma;
    fail("InvalidParameter", "unknown quantity '" + s + "'");
}

SlopeFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 3) fail("InvalidParameter", "need at least 3 points");
    const Eigen::Index n = Eigen::Index(x.size());
    Mat A(n, 2);
    Vec b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(x[std::size_t(i)] > 0 && y[std::size_t(i)] > 0))
            fail("NonPositiveQuantity", "log-log fit needs positive values");
        A(i, 0) = std::log(x[std::size_t(i)]);
        A(i, 1) = 1.0;
        b(i) = std::log(y[std::size_t(i)]);
    }
    Vec coef = A.colPivHouseholderQr().solve(b);
    Vec res = b - A * coef;
    const double s2 = res.squaredNorm() / double(n - 2);
    const Mat cov = s2 * (A.transpose() * A).inverse();
    return SlopeFit{coef(0), std::sqrt(cov(0, 0)), coef(1)};
}

std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0 && hi > lo) || points < 2) fail("InvalidParameter", "invalid log grid");
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        g[std::size_t(i)] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (points - 1));
    return g;
}

SlopeFit scaling_exponent(const ProbeModel& m, const std::vector<double>& grid, Quantity q) {
    if (grid.size() < 2) fail("InvalidParameter", "grid too small");
    const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
    if (!(*lo > 0)) fail("InvalidParameter", "grid must be positive");
    const double decades = std::log10(*hi / *lo);
    if (double(grid.size()) < 6.0 * std::max(decades, 1.0))
        fail("InvalidParameter", "need at least 6 points per decade");
    std::vector<double> y;
    for (double t : grid) y.push_back(quantity(fisher(m, t, PhiMethod::Auto), q));
    return loglog_fit(grid, y);
}

Mat sensitivity_matrix(const std::function<Mat(double)>& S_of_theta, double theta, double h) {
    const Mat S = S_of_theta(theta);
    if (S.rows() != S.cols() || S.rows() % 2) fail("DimensionMismatch", "S must be square and even");
    return S.partialPivLu().solve(derivative(S_of_theta, theta, h));
}

CayleySensitivity sensitivity_cayley(const Mat& M, const Mat& dM, double tol) {
    const Eigen::Index d = M.rows();
    if (M.cols() != d || dM.rows() != d || dM.cols() != d || d % 2)
        fail("DimensionMismatch", "M and dM must be square of the same even size");
    const Mat OM = omega_matrix(int(d / 2)) * M;
    const Mat I = Mat::Identity(d, d);
    const Mat Am = OM - 0.5 * I, Ap = OM + 0.5 * I;
    CayleySensitivity c;
    c.sigma_min_minus = Eigen::JacobiSVD<Mat>(Am).singularValues().minCoeff();
    c.sigma_min_plus = Eigen::JacobiSVD<Mat>(Ap).singularValues().minCoeff();
    const double scale = std::max(1.0, max_abs(OM));
    if (c.sigma_min_minus < tol * scale || c.sigma_min_plus < tol * scale)
        fail("SingularFactor", "Omega M -+ Id/2 is singular; W diverges");
    c.W = Am.partialPivLu().solve(omega_matrix(int(d / 2)) * dM) * Ap.partialPivLu().inverse();
    return c;
}

}  // namespace sympl::sensing
