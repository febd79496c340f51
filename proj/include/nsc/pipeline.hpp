#pragma once

// End-to-end explore-then-commit pipeline: configuration resolution, the full
// two-phase algorithm, comparator search, regret accounting, and sweeps.

#include "nsc/gpc.hpp"
#include "nsc/lds.hpp"
#include "nsc/numerics.hpp"
#include "nsc/sysid.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace nsc::pipeline {

using lds::CostGen;
using lds::CostKind;
using lds::DisturbanceGen;
using lds::DisturbanceKind;
using lds::LinSystem;
using lds::StabilityCertificate;
using lds::SynthInstance;
using lds::Trajectory;

// ---------------------------------------------------------------------------
// Configuration

struct DisturbanceSpec {
    DisturbanceKind kind = DisturbanceKind::kSinusoid;
    double period = 40.0;
};

struct CostSpec {
    CostKind kind = CostKind::kQuadratic;
    double q_scale = 1.0;
    double r_scale = 1.0;
    double mod_amp = 0.5;
    double mod_period = 200.0;
};

struct ExperimentConfig {
    int dx = 3;
    int du = 2;
    double kappa = 2.0;
    double gamma = 0.5;
    int k = 3;
    std::int64_t T = 4096;
    std::int64_t T0 = -1;  // -1 = auto
    int H = -1;            // -1 = auto
    double eta = -1.0;     // -1 = auto
    double delta = 0.1;
    double W = 1.0;
    double G = 2.0;
    std::uint64_t seed = 0;
    double explore_scale = 1.0;
    DisturbanceSpec disturbance;
    CostSpec cost;

    std::int64_t resolved_T0() const {
        if (T0 >= 0) return T0;
        const double raw = std::pow(static_cast<double>(T), 2.0 / 3.0) *
                           std::log(1.0 / delta);
        return std::max<std::int64_t>(k + 10,
                                      static_cast<std::int64_t>(std::ceil(raw)));
    }
    int resolved_H() const {
        return (H >= 0) ? H : gpc::default_memory(kappa, gamma, T);
    }
    double resolved_eta() const {
        return (eta >= 0.0) ? eta : 1.0 / (G * std::max(W, 1.0) *
                                           std::sqrt(static_cast<double>(T)));
    }

    void validate() const {
        if (dx < 1 || du < 1) throw ConfigError("dims", "dimensions must be positive");
        if (kappa < 1.0) throw ConfigError("kappa", "kappa must be at least 1");
        if (gamma <= 0.0 || gamma >= 1.0)
            throw ConfigError("gamma", "gamma must lie in (0, 1)");
        if (k < 1) throw ConfigError("k", "k must be at least 1");
        if (T < 1) throw ConfigError("T", "T must be at least 1");
        if (delta <= 0.0 || delta >= 1.0)
            throw ConfigError("delta", "delta must lie in (0, 1)");
        if (W < 0.0) throw ConfigError("W", "W must be nonnegative");
        if (G <= 0.0) throw ConfigError("G", "G must be positive");
        if (explore_scale != 1.0 && explore_scale != W)
            throw ConfigError("explore_scale", "exploration scale must be 1 or W");
        const std::int64_t t0 = resolved_T0();
        if (t0 <= k) throw ConfigError("T0", "T0 must exceed k");
        if (T <= t0) throw ConfigError("T", "T must exceed T0");
        if (H >= 0 && H < 1) throw ConfigError("H", "H must be at least 1");
        if (eta >= 0.0 && eta == 0.0) throw ConfigError("eta", "eta must be positive");
    }
};

inline DisturbanceGen make_disturbance_from(const ExperimentConfig& cfg) {
    return lds::make_disturbance(cfg.disturbance.kind, cfg.dx, cfg.W, cfg.seed,
                                 cfg.disturbance.period);
}

inline CostGen make_costs_from(const ExperimentConfig& cfg) {
    lds::CostParams p;
    p.mod_amp = cfg.cost.mod_amp;
    p.mod_period = cfg.cost.mod_period;
    if (cfg.cost.kind == CostKind::kLinearPlusQuadratic) {
        p.q = 0.1 * Vec::Ones(cfg.dx);
        p.r = 0.1 * Vec::Ones(cfg.du);
    }
    return lds::make_costs(cfg.cost.kind, cfg.cost.q_scale * Mat::Identity(cfg.dx, cfg.dx),
                           cfg.cost.r_scale * Mat::Identity(cfg.du, cfg.du), p);
}

// ---------------------------------------------------------------------------
// Comparator

/// J(K): cost of u_t = -K x_t on the true system over steps [begin, end).
/// Rejects K unless the closed loop is strictly stable.
inline double comparator_cost(const LinSystem& sys, const DisturbanceGen& dist,
                              const CostGen& costs, const Mat& k_mat,
                              std::int64_t T, std::int64_t begin = 0,
                              std::int64_t end = -1) {
    const double rho = spectral_radius(sys.A - sys.B * k_mat);
    if (rho >= 1.0)
        throw PreconditionError("comparator_cost: unstable gain, spectral radius " +
                                std::to_string(rho));
    if (end < 0) end = T;
    Vec x = Vec::Zero(sys.state_dim());
    double j = 0.0;
    for (std::int64_t t = 0; t < T; ++t) {
        const Vec u = -k_mat * x;
        if (t >= begin && t < end) j += costs.at(t, x, u);
        x = lds::step(sys, x, u, dist.at(t));
    }
    return j;
}

namespace detail {

// cost with precomputed disturbances and a stability clamp; +inf when clamped
inline double clamped_cost(const LinSystem& sys, const std::vector<Vec>& w,
                           const CostGen& costs, const Mat& k_mat,
                           double radius_clamp, std::int64_t begin,
                           std::int64_t end) {
    if (spectral_radius(sys.A - sys.B * k_mat) > radius_clamp)
        return std::numeric_limits<double>::infinity();
    Vec x = Vec::Zero(sys.state_dim());
    double j = 0.0;
    const std::int64_t T = static_cast<std::int64_t>(w.size());
    for (std::int64_t t = 0; t < T; ++t) {
        const Vec u = -k_mat * x;
        if (t >= begin && t < end) j += costs.at(t, x, u);
        x = sys.A * x + sys.B * u + w[t];
    }
    return j;
}

/// Discrete algebraic Riccati equation by value iteration.
inline Mat solve_dare(const Mat& a, const Mat& b, const Mat& q, const Mat& r,
                      int max_iter = 10000, double tol = 1e-13) {
    Mat p = q;
    for (int it = 0; it < max_iter; ++it) {
        const Mat btp = b.transpose() * p;
        const Mat gain = (r + btp * b).ldlt().solve(btp * a);
        const Mat next = q + a.transpose() * p * a -
                         a.transpose() * p * b * gain;
        const double drift = (next - p).cwiseAbs().maxCoeff();
        p = next;
        if (drift <= tol * std::max(1.0, p.cwiseAbs().maxCoeff())) break;
    }
    return p;
}

inline Mat dare_gain(const Mat& a, const Mat& b, const Mat& q, const Mat& r) {
    const Mat p = solve_dare(a, b, q, r);
    const Mat btp = b.transpose() * p;
    return (r + btp * b).ldlt().solve(btp * a);
}

}  // namespace detail

struct ComparatorSearchConfig {
    Mat K0;                 // known stabilizer, always in the pool
    double kappa = 2.0;
    double gamma = 0.5;     // clamp: spectral radius of A - BK <= 1 - gamma/4
    int restarts = 20;
    int sweeps = 12;
    std::uint64_t seed = 0;
    std::int64_t begin = 0;
    std::int64_t end = -1;
};

struct ComparatorResult {
    Mat K_star;
    double J_star = 0.0;
};

// Upper-bound search for min_K J(K): the stabilizer, the infinite-horizon
// Riccati gain for the averaged quadratic cost, and multi-start coordinate
// descent with a stability clamp. J(K) is non-convex in K, so the result is
// the best candidate found, not a certified optimum.
inline ComparatorResult best_linear_comparator(const LinSystem& sys,
                                               const DisturbanceGen& dist,
                                               const CostGen& costs, std::int64_t T,
                                               const ComparatorSearchConfig& cfg) {
    std::vector<Vec> w(T);
    for (std::int64_t t = 0; t < T; ++t) w[t] = dist.at(t);
    const double clamp = 1.0 - cfg.gamma / 4.0;
    const std::int64_t end = (cfg.end < 0) ? T : cfg.end;
    auto eval = [&](const Mat& k_mat) {
        return detail::clamped_cost(sys, w, costs, k_mat, clamp, cfg.begin, end);
    };

    std::vector<Mat> pool;
    pool.push_back(cfg.K0);
    if (costs.kind == CostKind::kQuadratic ||
        costs.kind == CostKind::kTimeVaryingQuadratic ||
        costs.kind == CostKind::kLinearPlusQuadratic) {
        // mean modulation weight is 1, so the averaged cost uses Q, R directly
        pool.push_back(detail::dare_gain(sys.A, sys.B, costs.Q, costs.R));
    }

    Mat best_k;
    double best_j = std::numeric_limits<double>::infinity();
    for (const auto& k_mat : pool) {
        const double j = eval(k_mat);
        if (j < best_j) {
            best_j = j;
            best_k = k_mat;
        }
    }
    if (!std::isfinite(best_j))
        throw SearchError("best_linear_comparator: no stabilizing candidate found");

    CounterRng rng(cfg.seed, Stream::kSearch);
    const int du = sys.control_dim();
    const int dx = sys.state_dim();
    std::uint64_t draw = 0;
    for (int restart = 0; restart < cfg.restarts; ++restart) {
        Mat k_cur = pool[restart % pool.size()];
        if (restart >= static_cast<int>(pool.size())) {
            Mat noise(du, dx);
            for (int i = 0; i < du; ++i)
                for (int j = 0; j < dx; ++j) noise(i, j) = rng.gaussian(draw++);
            k_cur = best_k + (0.05 + 0.4 * rng.uniform01(draw++)) * noise;
        }
        double j_cur = eval(k_cur);
        if (!std::isfinite(j_cur)) {
            k_cur = best_k;
            j_cur = best_j;
        }
        double step_size = 0.1;
        for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
            bool improved = false;
            for (int i = 0; i < du; ++i) {
                for (int j = 0; j < dx; ++j) {
                    for (double sense : {+1.0, -1.0}) {
                        Mat k_try = k_cur;
                        k_try(i, j) += sense * step_size;
                        const double j_try = eval(k_try);
                        if (j_try < j_cur) {
                            k_cur = k_try;
                            j_cur = j_try;
                            improved = true;
                        }
                    }
                }
            }
            if (!improved) step_size *= 0.5;
        }
        if (j_cur < best_j) {
            best_j = j_cur;
            best_k = k_cur;
        }
    }
    return {best_k, best_j};
}

inline double compute_regret(double j_alg, double j_star) { return j_alg - j_star; }

// ---------------------------------------------------------------------------
// Algorithm 1

struct RegretReport {
    double J_alg = 0.0;
    double J_phase1 = 0.0;
    double J_phase2 = 0.0;
    double J_star = 0.0;
    double regret = 0.0;
    Mat K_star;
    std::vector<double> cost_series;  // length T
    double eps_A = 0.0;
    double eps_B = 0.0;
    double sigma_min_c0 = 0.0;
    std::int64_t T = 0, T0 = 0;  // resolved horizon split
    int H = 0;
    double eta = 0.0;
    ExperimentConfig params;  // config echo
};

struct InjectedEstimate {
    Mat A_hat, B_hat;
};

struct Algorithm1Result {
    RegretReport report;
    Trajectory traj;
    sysid::SysIdEstimate est;
    SynthInstance instance;
};

struct RunOptions {
    std::optional<SynthInstance> instance;       // default: synthesized from cfg
    std::optional<InjectedEstimate> inject;      // skip phase 1 recovery
    bool with_comparator = true;
    int comparator_restarts = 20;
};

inline Algorithm1Result run_algorithm1(const ExperimentConfig& cfg,
                                       const RunOptions& opts = {}) {
    cfg.validate();
    Algorithm1Result out;
    out.instance = opts.instance.has_value()
                       ? *opts.instance
                       : lds::synth_stable_instance(cfg.dx, cfg.du, cfg.kappa,
                                                    cfg.gamma, cfg.seed);
    const LinSystem& sys = out.instance.sys;
    const StabilityCertificate& cert = out.instance.cert;
    const DisturbanceGen dist = make_disturbance_from(cfg);
    const CostGen costs = make_costs_from(cfg);

    const std::int64_t T = cfg.T;
    const std::int64_t T0 = cfg.resolved_T0();
    const int H = cfg.resolved_H();
    const double eta = cfg.resolved_eta();

    // Phase 1: explore for t = 0..T0, then recover the system
    auto ex = sysid::explore(sys, cert.K, dist, T0, cfg.seed, cfg.explore_scale);
    if (opts.inject.has_value()) {
        out.est.A_hat = opts.inject->A_hat;
        out.est.B_hat = opts.inject->B_hat;
        out.est.A_prime_hat = out.est.A_hat - out.est.B_hat * cert.K;
        out.est.sigma_min_c0 = std::numeric_limits<double>::quiet_NaN();
    } else {
        try {
            const auto moments =
                sysid::estimate_moments(ex.traj, ex.eta, cfg.k, T0, cfg.explore_scale);
            out.est = sysid::recover_system(moments, cert.K);
        } catch (const RankError& e) {
            throw RankError(std::string("phase1: ") + e.what(), e.sigma);
        }
    }

    // Phase 2: w_hat_t = 0 for t < T0, w_hat_T0 = x_{T0+1}
    out.traj = std::move(ex.traj);
    Trajectory& traj = out.traj;
    traj.w_hat.assign(T0, Vec::Zero(cfg.dx));
    traj.w_hat.push_back(traj.x[T0 + 1]);

    gpc::Phase2Controller ctrl(out.est.A_hat, out.est.B_hat, cert.K, H, eta,
                               cfg.kappa, cfg.gamma, &costs);
    ctrl.push_disturbance(traj.x[T0 + 1]);
    Vec x = traj.x[T0 + 1];
    for (std::int64_t t = T0 + 1; t < T; ++t) {
        Vec u = ctrl.act(t, x);
        const Vec w = dist.at(t);
        Vec x_next = lds::step(sys, x, u, w);
        traj.w_hat.push_back(ctrl.observe(t, x, u, x_next));
        traj.u.push_back(std::move(u));
        traj.w.push_back(w);
        traj.x.push_back(x_next);
        x = std::move(x_next);
    }

    RegretReport& rep = out.report;
    rep.T = T;
    rep.T0 = T0;
    rep.H = H;
    rep.eta = eta;
    rep.cost_series.resize(T);
    for (std::int64_t t = 0; t < T; ++t) {
        rep.cost_series[t] = costs.at(t, traj.x[t], traj.u[t]);
        if (t <= T0)
            rep.J_phase1 += rep.cost_series[t];
        else
            rep.J_phase2 += rep.cost_series[t];
    }
    traj.cost = rep.cost_series;
    rep.J_alg = rep.J_phase1 + rep.J_phase2;

    const auto err = sysid::recovery_error(out.est, sys);
    rep.eps_A = err.eps_A;
    rep.eps_B = err.eps_B;
    rep.sigma_min_c0 = out.est.sigma_min_c0;

    if (opts.with_comparator) {
        ComparatorSearchConfig scfg;
        scfg.K0 = cert.K;
        scfg.kappa = cfg.kappa;
        scfg.gamma = cfg.gamma;
        scfg.restarts = opts.comparator_restarts;
        scfg.seed = cfg.seed;
        const auto comp = best_linear_comparator(sys, dist, costs, T, scfg);
        rep.K_star = comp.K_star;
        rep.J_star = comp.J_star;
        rep.regret = compute_regret(rep.J_alg, rep.J_star);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
    std::int64_t T = 0, T0 = 0;
    double regret = 0.0;
    double eps_A = 0.0, eps_B = 0.0;
    std::uint64_t seed = 0;
    std::int64_t runtime_ms = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;            // grid order
    std::vector<std::int64_t> T_values;    // distinct horizons, ascending
    std::vector<double> median_regret;     // per horizon
    double regret_slope = 0.0;             // log-log OLS; NaN if not fittable
};

/// OLS slope of log(y) on log(x); NaN when any y <= 0 or fewer than 2 points.
inline double loglog_slope(const std::vector<double>& xs,
                           const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    if (n < 2 || ys.size() != n) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            return std::numeric_limits<double>::quiet_NaN();
        const double lx = std::log(xs[i]);
        const double ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double d = n * sxx - sx * sx;
    return (n * sxy - sx * sy) / d;
}

inline double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Runs the grid (optionally across worker threads); rows come back in grid
// order, so output is deterministic apart from the runtime measurements.
inline SweepResult sweep(const std::vector<ExperimentConfig>& grid, int jobs = 1,
                         int comparator_restarts = 20) {
    SweepResult res;
    res.rows.resize(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            const auto start = std::chrono::steady_clock::now();
            RunOptions opts;
            opts.comparator_restarts = comparator_restarts;
            const auto run = run_algorithm1(grid[i], opts);
            const auto stop = std::chrono::steady_clock::now();
            SweepRow row;
            row.T = run.report.T;
            row.T0 = run.report.T0;
            row.regret = run.report.regret;
            row.eps_A = run.report.eps_A;
            row.eps_B = run.report.eps_B;
            row.seed = grid[i].seed;
            row.runtime_ms =
                std::chrono::duration_cast<std::chrono::milliseconds>(stop - start)
                    .count();
            res.rows[i] = row;
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int j = 0; j < jobs; ++j) threads.emplace_back(worker);
        for (auto& th : threads) th.join();
    }

    for (const auto& row : res.rows)
        if (std::find(res.T_values.begin(), res.T_values.end(), row.T) ==
            res.T_values.end())
            res.T_values.push_back(row.T);
    std::sort(res.T_values.begin(), res.T_values.end());
    std::vector<double> xs, ys;
    for (const auto t : res.T_values) {
        std::vector<double> regrets;
        for (const auto& row : res.rows)
            if (row.T == t) regrets.push_back(row.regret);
        res.median_regret.push_back(median(std::move(regrets)));
        xs.push_back(static_cast<double>(t));
        ys.push_back(res.median_regret.back());
    }
    res.regret_slope = loglog_slope(xs, ys);
    return res;
}

}  // namespace nsc::pipeline
