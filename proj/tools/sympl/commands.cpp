#include "commands.hpp"

#include <cmath>

#include <spdlog/spdlog.h>

#include "sympl/channels.hpp"
#include "sympl/control.hpp"
#include "sympl/discrete.hpp"
#include "sympl/scattering.hpp"
#include "sympl/sensing.hpp"
#include "sympl/transduction.hpp"

namespace sympl::cli {

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void require_format(const RunOptions& opt, bool csv_ok, const char* cmd) {
    if (opt.format == Format::Csv && !csv_ok)
        throw UsageError("UnsupportedFormat", std::string(cmd) + " only emits json");
}

double max_abs(const Mat& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

// Square matrix from config, or a seeded random symplectic matrix.
Mat matrix_or_random(Config& cfg, const RunOptions& opt, const std::string& key) {
    if (cfg.has(key)) return cfg.matrix(key);
    Config r = cfg.object("random");
    int modes = r.integer("modes");
    double squeeze = r.number("squeeze_bound", 2.0);
    r.finish();
    if (modes < 1 || modes > 64) throw UsageError("InvalidConfig", "random.modes must lie in [1, 64]");
    return random_symplectic(modes, opt.require_seed("random matrix requested"), squeeze);
}

CMat complex_matrix(Config& cfg, const std::string& key, int n) {
    if (!cfg.has(key)) return CMat::Zero(n, n);
    const json& v = cfg.raw(key);
    if (v.is_array()) {
        Mat re = as_matrix(v, cfg.where() + "." + key);
        return re.cast<std::complex<double>>();
    }
    Config c = cfg.object(key);
    Mat re = c.has("re") ? c.matrix("re") : Mat::Zero(n, n);
    Mat im = c.has("im") ? c.matrix("im") : Mat::Zero(n, n);
    c.finish();
    if (re.rows() != n || re.cols() != n || im.rows() != n || im.cols() != n)
        throw UsageError("InvalidConfig", cfg.where() + "." + key + ": expected " + std::to_string(n) + "x" + std::to_string(n));
    CMat X(n, n);
    X.real() = re;
    X.imag() = im;
    return X;
}

json imat_json(const discrete::IMat& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

// ---------------------------------------------------------------- fidelity-sweep

Output cmd_fidelity_sweep(Config& cfg, const RunOptions& opt) {
    std::vector<std::string> models;
    if (cfg.has("model") && cfg.raw("model").is_string()) {
        models.push_back(cfg.string("model"));
    } else if (cfg.has("model")) {
        for (const auto& m : cfg.raw("model")) {
            if (!m.is_string()) throw UsageError("InvalidConfig", "model entries must be strings");
            models.push_back(m.get<std::string>());
        }
    } else {
        models = {"passive", "active"};
    }
    // either t² or the coupling C of the example systems
    bool by_c = cfg.has("C");
    if (by_c && cfg.has("t_sq")) throw UsageError("InvalidConfig", "give t_sq or C, not both");
    std::vector<double> params = cfg.numbers(by_c ? "C" : "t_sq");
    std::vector<double> mu = cfg.has("mu") ? cfg.numbers("mu") : std::vector<double>{0.0};
    std::vector<double> nu = as_grid(cfg, "nu");
    std::string units = cfg.string("units", "linear");
    cfg.finish();

    if (units != "linear" && units != "db") throw UsageError("InvalidConfig", "units must be 'linear' or 'db'");
    auto value = [&](double x) { return units == "db" ? std::pow(10.0, x / 10.0) : x; };
    for (const auto& m : models)
        if (m != "passive" && m != "active") throw UsageError("InvalidConfig", "unknown model '" + m + "'");
    for (double t : params)
        if (!(t > 0.0)) throw UsageError("InvalidGrid", "t_sq and C entries must be positive");
    for (double x : mu)
        if (!(value(x) >= 0.0)) throw UsageError("InvalidGrid", "mu must be >= 0");
    for (double x : nu)
        if (!(value(x) >= 0.0)) throw UsageError("InvalidGrid", "nu must be >= 0");

    const auto part = transduction::default_partition(2);
    CsvWriter csv({"model", "t_sq", "mu", "nu", "fidelity_adaptive", "fidelity_direct", "threshold"});
    json rows = json::array();
    for (const auto& model : models) {
        for (double x : params) {
            if (model == "passive" && !by_c && x > 1.0) throw UsageError("InvalidGrid", "passive t_sq must lie in (0, 1]");
            double C = x;
            if (!by_c) C = model == "passive" ? transduction::passive_C_from_t2(x) : transduction::active_C_from_t2(x);
            Mat S = model == "passive" ? transduction::passive_example(C) : transduction::active_example(C);
            double t2 = by_c ? S(1, 0) * S(1, 0) : x;
            double f_direct = transduction::average_fidelity(transduction::direct_channel_optimized(S, part));
            spdlog::debug("{} t_sq={} direct={}", model, t2, f_direct);
            for (double m : mu) {
                for (double n : nu) {
                    transduction::Imperfections imp;
                    imp.mu = value(m);
                    imp.nu = value(n);
                    double f_ad = transduction::average_fidelity(transduction::adaptive_channel(S, part, imp));
                    csv.row({model, fmt_double(t2), fmt_double(m), fmt_double(n), fmt_double(f_ad),
                             fmt_double(f_direct), fmt_double(0.5)});
                    rows.push_back({{"model", model}, {"t_sq", t2}, {"mu", m}, {"nu", n},
                                    {"fidelity_adaptive", f_ad}, {"fidelity_direct", f_direct}, {"threshold", 0.5}});
                }
            }
        }
    }
    if (opt.format == Format::Csv) return {csv.str(), ""};
    return {dump(json{{"units", units}, {"rows", rows}}), ""};
}

// ---------------------------------------------------------------- ep-fisher

Output cmd_ep_fisher(Config& cfg, const RunOptions& opt) {
    std::string model = cfg.string("model", "ep");
    double kappa = cfg.number("kappa", 1.0);
    double g = cfg.number("g", 2.0);
    std::string norm = cfg.string("normalization", "displayed");
    std::vector<double> theta = as_grid(cfg, "theta");
    std::string method = cfg.string("method", "exact");
    std::string qname = cfg.string("quantity", "QFI_xbar");
    cfg.finish();

    sensing::PhiMethod pm;
    if (method == "exact") pm = sensing::PhiMethod::Exact;
    else if (method == "approximate") pm = sensing::PhiMethod::Approximate;
    else if (method == "auto") pm = sensing::PhiMethod::Auto;
    else throw UsageError("InvalidConfig", "method must be exact|approximate|auto");
    if (norm != "displayed" && norm != "physical") throw UsageError("InvalidConfig", "normalization must be displayed|physical");
    for (double t : theta)
        if (!(t > 0.0)) throw UsageError("InvalidGrid", "theta values must be positive");
    sensing::Quantity q;
    try {
        q = sensing::quantity_from_string(qname);
    } catch (const Error& e) {
        throw UsageError("InvalidConfig", e.what());
    }

    auto probe = sensing::default_probe(2);
    sensing::ProbeModel m;
    if (model == "ep") {
        auto n = norm == "physical" ? sensing::EPNormalization::Physical : sensing::EPNormalization::Displayed;
        m = sensing::ep_two_mode_model(kappa, g, 2 * g - kappa, 2 * g + kappa, probe, true, n);
    } else if (model == "diagonalizable") {
        m = sensing::diagonalizable_control_model(kappa, g, probe);
    } else if (model == "off_resonance") {
        m = sensing::off_resonance_model(kappa, g, probe);
    } else {
        throw UsageError("InvalidConfig", "model must be ep|diagonalizable|off_resonance");
    }

    CsvWriter csv({"theta", "I_mu", "I_sigma", "QFI_xbar", "QFI_V"});
    json rows = json::array();
    std::vector<double> ys;
    bool approx = false;
    for (double t : theta) {
        auto r = sensing::fisher(m, t, pm);
        approx = approx || r.approx_used;
        ys.push_back(sensing::quantity(r, q));
        csv.row({fmt_double(t), fmt_double(r.I_mu), fmt_double(r.I_sigma), fmt_double(r.QFI_xbar), fmt_double(r.QFI_V)});
        rows.push_back({{"theta", t}, {"I_mu", r.I_mu}, {"I_sigma", r.I_sigma}, {"QFI_xbar", r.QFI_xbar},
                        {"QFI_V", r.QFI_V}, {"approx_used", r.approx_used}});
    }
    json fit = json::object();
    fit["model"] = m.name;
    fit["quantity"] = qname;
    fit["points"] = theta.size();
    if (theta.size() >= 2) {
        auto f = sensing::loglog_fit(theta, ys);
        fit["slope"] = f.slope;
        fit["stderr"] = f.stderr_;
        fit["intercept"] = f.intercept;
    }
    fit["approx_used"] = approx;
    if (opt.format == Format::Csv) return {csv.str(), dump(fit)};
    return {dump(json{{"rows", rows}, {"fit", fit}}), ""};
}

// ---------------------------------------------------------------- permute-plan

Output cmd_permute_plan(Config& cfg, const RunOptions& opt) {
    require_format(opt, false, "permute-plan");
    Mat S = matrix_or_random(cfg, opt, "S");
    std::vector<int> perm = cfg.has("permutation") ? cfg.integers("permutation") : std::vector<int>{};
    bool construct = cfg.boolean("construct", true);
    cfg.finish();

    const int n = modes_of(S);
    double tol = opt.tol_or(1e-9);
    if (!is_symplectic(S, tol * std::max(1.0, max_abs(S) * max_abs(S))))
        throw Error("NotSymplectic", "NotSymplectic: S fails the symplectic test");
    if (perm.empty()) perm = control::transposition(n, 0, n - 1);
    if (int(perm.size()) != n) throw UsageError("InvalidConfig", "permutation must list every mode");
    {
        std::vector<int> seen(static_cast<std::size_t>(n), 0);
        for (int p : perm) {
            if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)]++)
                throw UsageError("InvalidConfig", "permutation is not a bijection of the modes");
        }
    }

    json out = json::object();
    out["modes"] = n;
    out["permutation"] = perm;

    auto st = control::stabilize(S);
    json stab = json::object();
    stab["c"] = st.c;
    stab["d"] = st.d;
    json fc = json::array();
    for (Eigen::Index i = 0; i < st.f_c.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < st.f_c.cols(); ++j) r.push_back(st.f_c(i, j));
        fc.push_back(r);
    }
    stab["f_c"] = fc;
    stab["summands"] = st.summands;
    stab["permutations"] = st.permutations;
    out["stabilization"] = stab;

    std::vector<Mat> copies(16, S);
    json steps = json::array();
    for (auto [j, k] : control::transpositions(perm)) {
        json s = json::object();
        s["j"] = j;
        s["k"] = k;
        auto cert = control::classify_swappable(st, j, k);
        s["swappable_by_support"] = cert.swappable;
        s["summand"] = cert.summand;
        s["power"] = cert.power;
        if (construct && n >= 2) {
            try {
                auto sw = control::sandwich_swap(copies, j, k);
                s["residual"] = sw.residual;
                s["locals"] = sw.L.size();
                s["symplectic_residual"] = symplectic_residual(sw.S);
                json locals = json::array();
                for (const auto& L : sw.L) {
                    json blocks = json::array();
                    for (const auto& b : L.blocks) blocks.push_back(to_json(b));
                    locals.push_back(blocks);
                }
                s["local_blocks"] = locals;
                s["S"] = to_json(sw.S);
            } catch (const Error& e) {
                s["construction_error"] = e.code();
            }
        }
        steps.push_back(s);
    }
    out["transpositions"] = steps;
    return {dump(out), ""};
}

// ---------------------------------------------------------------- scatter

Output cmd_scatter(Config& cfg, const RunOptions& opt) {
    require_format(opt, false, "scatter");
    std::string kind = cfg.string("kind", "passive");
    double tol = opt.tol_or(1e-9);
    json out = json::object();
    out["kind"] = kind;

    if (auto ex = cfg.optional_object("example")) {
        double chi = ex->number("chi");
        double k1 = ex->number("kappa1", 1.0), k2 = ex->number("kappa2", 1.0);
        ex->finish();
        cfg.finish();
        Mat S;
        if (kind == "passive") S = scattering::passive_two_mode(chi, k1, k2);
        else if (kind == "active") S = scattering::active_two_mode(chi, k1, k2);
        else throw UsageError("InvalidConfig", "kind must be passive|active");
        double r = S(0, 2), t = S(1, 0);
        out["ordering"] = "interleaved";
        out["labels"] = "transduction";
        out["chi"] = chi;
        out["r"] = r;
        out["t"] = t;
        out["S"] = to_json(S);
        double res = symplectic_residual(S);
        out["symplectic_residual"] = res;
        out["symplectic"] = res <= tol * std::max(1.0, max_abs(S) * max_abs(S));
        return {dump(out), ""};
    }

    std::vector<double> kappa = cfg.numbers("kappa");
    const int n = int(kappa.size());
    CMat Y = complex_matrix(cfg, "Y", n);
    CMat W = complex_matrix(cfg, "W", n);
    double omega = cfg.number("omega", 0.0);
    std::vector<double> c = cfg.has("C") ? cfg.numbers("C") : std::vector<double>{};
    std::vector<double> d = cfg.has("D") ? cfg.numbers("D") : std::vector<double>{};
    cfg.finish();
    for (double k : kappa)
        if (!(k > 0.0)) throw UsageError("InvalidConfig", "kappa entries must be positive");
    if (c.empty())
        for (double k : kappa) c.push_back(std::sqrt(k));
    if (int(c.size()) != n || (!d.empty() && int(d.size()) != n))
        throw UsageError("InvalidConfig", "C and D need one entry per mode");

    Vec kv = Eigen::Map<const Vec>(kappa.data(), n), cv = Eigen::Map<const Vec>(c.data(), n);
    scattering::ScatteringResult res;
    if (kind == "passive") {
        if (W.cwiseAbs().maxCoeff() > 0) throw UsageError("InvalidConfig", "passive scattering takes no W");
        Vec dv = d.empty() ? Vec(-cv) : Vec(Eigen::Map<const Vec>(d.data(), n));
        Vec k2(2 * n), c2(2 * n), d2(2 * n);
        k2 << kv, kv;
        c2 << cv, cv;
        d2 << dv, dv;
        res = scattering::passive_scattering(Y, Mat(k2.asDiagonal()), Mat(c2.asDiagonal()), Mat(d2.asDiagonal()),
                                             omega, tol);
        out["ordering"] = "grouped";
    } else if (kind == "active") {
        Vec dv = d.empty() ? cv : Vec(Eigen::Map<const Vec>(d.data(), n));
        auto p = scattering::normalize_active({Y, W}, kv, cv, dv, omega);
        res = scattering::active_scattering(p, tol);
        out["ordering"] = "sidebands (Q_w, P_w, Q_-w, P_-w)";
    } else {
        throw UsageError("InvalidConfig", "kind must be passive|active");
    }
    out["omega"] = omega;
    out["S"] = to_json(res.S);
    out["symplectic_residual"] = res.residual;
    out["symplectic"] = res.symplectic;
    return {dump(out), ""};
}

// ---------------------------------------------------------------- dv-teleport

Output cmd_dv_teleport(Config& cfg, const RunOptions& opt) {
    using namespace discrete;
    std::vector<Gate> gates;
    DVPartition part;
    int nq = 0;
    Int d = 2;
    std::string example = cfg.string("example", "");
    if (!example.empty()) {
        if (example == "teleportation") {
            gates = teleportation_circuit();
            part = teleportation_partition();
            nq = 3;
        } else if (example == "gate_teleportation") {
            gates = gate_teleportation_circuit();
            part = gate_teleportation_partition();
            nq = 4;
        } else {
            throw UsageError("InvalidConfig", "example must be teleportation|gate_teleportation");
        }
    } else {
        nq = cfg.integer("n_qudits");
        d = cfg.integer("d", 2);
        const json& circ = cfg.raw("circuit");
        if (!circ.is_array()) throw UsageError("InvalidConfig", "circuit must be a list of gates");
        for (const auto& gj : circ) {
            Config gc(gj, "circuit[]");
            std::string name = gc.string("gate");
            std::vector<int> qs = gc.integers("qudits");
            gc.finish();
            try {
                gates.push_back(gate_from_string(name, qs));
            } catch (const Error& e) {
                throw UsageError("InvalidConfig", e.what());
            }
        }
        Config pc = cfg.object("partition");
        part.in = pc.integers("in");
        part.out = pc.integers("out");
        part.h = pc.integers("h");
        part.z = pc.integers("z");
        pc.finish();
    }
    cfg.finish();
    if (nq < 1 || nq > 16) throw UsageError("InvalidConfig", "n_qudits must lie in [1, 16]");
    if (d < 2 || d > 64) throw UsageError("InvalidConfig", "d must lie in [2, 64]");
    if (part.h.size() > 6) throw UsageError("InvalidConfig", "at most 6 syndrome coordinates");

    IMat S = circuit_compose(gates, nq, d);
    DVTeleport t = dv_teleport_transform(S, part, d);

    // every syndrome, in lexicographic order
    const int m = int(part.h.size());
    std::vector<std::pair<IVec, IVec>> table;
    IVec s = IVec::Zero(m);
    for (;;) {
        table.emplace_back(s, feedforward(t.F_star, s, d));
        int k = m - 1;
        while (k >= 0 && s(k) == d - 1) s(k--) = 0;
        if (k < 0) break;
        ++s(k);
    }

    if (opt.format == Format::Csv) {
        CsvWriter csv({"syndrome", "correction", "pauli"});
        auto join = [](const IVec& v) {
            std::string r;
            for (Eigen::Index i = 0; i < v.size(); ++i) r += (i ? " " : "") + std::to_string(v(i));
            return r;
        };
        for (const auto& [syn, corr] : table) csv.row({join(syn), join(corr), pauli_string(corr, d)});
        return {csv.str(), ""};
    }
    json out = json::object();
    out["d"] = d;
    out["n_qudits"] = nq;
    out["S"] = imat_json(S);
    out["symplectic"] = is_dv_symplectic(S, d);
    out["S_tilde"] = imat_json(t.S_tilde);
    out["F_star"] = imat_json(t.F_star);
    json ff = json::array();
    for (const auto& [syn, corr] : table) {
        json row = json::object();
        row["syndrome"] = std::vector<Int>(syn.data(), syn.data() + syn.size());
        row["correction"] = std::vector<Int>(corr.data(), corr.data() + corr.size());
        row["pauli"] = pauli_string(corr, d);
        ff.push_back(row);
    }
    out["feedforward"] = ff;
    return {dump(out), ""};
}

// ---------------------------------------------------------------- dilate

Output cmd_dilate(Config& cfg, const RunOptions& opt) {
    require_format(opt, false, "dilate");
    channels::GaussianChannel c;
    if (cfg.has("T")) {
        c.T = cfg.matrix("T");
        c.N = cfg.matrix("N");
        if (c.T.rows() != c.T.cols() || c.N.rows() != c.T.rows() || c.N.cols() != c.T.cols() || c.T.rows() % 2)
            throw UsageError("InvalidConfig", "T and N must be square, even and of equal size");
        c.d = Vec::Zero(c.T.rows());
    } else {
        Config r = cfg.object("random");
        int modes = r.integer("modes");
        double scale = r.number("t_scale", 1.0);
        r.finish();
        if (modes < 1 || modes > 16) throw UsageError("InvalidConfig", "random.modes must lie in [1, 16]");
        c = channels::random_cp_channel(modes, opt.require_seed("random channel requested"), scale);
    }
    cfg.finish();

    double tol = opt.tol_or(1e-8);
    auto dr = channels::dilate(c);
    auto back = channels::from_dilation(dr.S, dr.n_a, dr.env_cov);
    double rt = std::max(max_abs(Mat(back.T - c.T)), max_abs(Mat(back.N - c.N)));
    auto lem = channels::dilation_block_residuals(dr);

    json out = json::object();
    out["n_a"] = dr.n_a;
    out["n_b"] = dr.n_b;
    out["cp_margin"] = channels::cp_margin(c);
    out["T"] = to_json(c.T);
    out["N"] = to_json(c.N);
    out["S"] = to_json(dr.S);
    out["env_cov"] = to_json(dr.env_cov);
    out["symplectic_residual"] = symplectic_residual(dr.S);
    out["roundtrip_residual"] = rt;
    out["block_residuals"] = {lem[0], lem[1], lem[2]};
    out["roundtrip_ok"] = rt < tol;
    return {dump(out), ""};
}

}  // namespace sympl::cli
