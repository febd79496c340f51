#pragma once

// Linear dynamical system model: simulation, disturbance and cost adversaries,
// strong stability / strong controllability certificates, and the closed-loop
// control lifting construction.

#include "nsc/numerics.hpp"
#include "nsc/rng.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace nsc::lds {

// ---------------------------------------------------------------------------
// Plant

struct LinSystem {
    Mat A;  // d_x x d_x
    Mat B;  // d_x x d_u

    LinSystem() = default;
    LinSystem(Mat a, Mat b) : A(std::move(a)), B(std::move(b)) { validate(); }

    int state_dim() const { return static_cast<int>(A.rows()); }
    int control_dim() const { return static_cast<int>(B.cols()); }

    void validate() const {
        if (A.rows() != A.cols())
            throw ShapeError("LinSystem: A must be square");
        if (B.rows() != A.rows())
            throw ShapeError("LinSystem: B row count must match state dimension");
        require_finite(A, "LinSystem.A");
        require_finite(B, "LinSystem.B");
    }
};

/// x_next = A x + B u + w
inline Vec step(const LinSystem& sys, const Vec& x, const Vec& u, const Vec& w) {
    if (x.size() != sys.A.rows())
        throw ShapeError("step: state dimension mismatch");
    if (u.size() != sys.B.cols())
        throw ShapeError("step: control dimension mismatch");
    if (w.size() != sys.A.rows())
        throw ShapeError("step: disturbance dimension mismatch");
    return sys.A * x + sys.B * u + w;
}

// ---------------------------------------------------------------------------
// Disturbance adversaries (Assumption: ||w_t|| <= W, sequence fixed up front)

enum class DisturbanceKind {
    kZero,
    kConstant,
    kSinusoid,
    kUniformBounded,
    kRademacherScaled,
    kGaussianClipped,
};

// Output at index t is a pure function of (t, seed); generators never see the
// trajectory, so obliviousness holds by construction.
struct DisturbanceGen {
    DisturbanceKind kind = DisturbanceKind::kZero;
    int dim = 0;
    double bound = 0.0;  // W
    double period = 40.0;
    std::uint64_t seed = 0;
    Mat frame;  // dim x 2 orthonormal columns for constant/sinusoid kinds

    Vec at(std::int64_t t) const {
        const auto u = static_cast<std::uint64_t>(t);
        switch (kind) {
            case DisturbanceKind::kZero:
                return Vec::Zero(dim);
            case DisturbanceKind::kConstant:
                return bound * frame.col(0);
            case DisturbanceKind::kSinusoid: {
                const double theta =
                    2.0 * std::numbers::pi * static_cast<double>(t) / period;
                if (dim == 1) return bound * std::sin(theta) * frame.col(0);
                // rotating pair keeps ||w_t|| = W for every t
                return bound * (std::sin(theta) * frame.col(0) +
                                std::cos(theta) * frame.col(1));
            }
            case DisturbanceKind::kUniformBounded: {
                CounterRng rng(seed, Stream::kDisturbance);
                const double amp = bound / std::sqrt(static_cast<double>(dim));
                return rng.uniform_vec(dim, u, -amp, amp);
            }
            case DisturbanceKind::kRademacherScaled: {
                CounterRng rng(seed, Stream::kDisturbance);
                const double amp = bound / std::sqrt(static_cast<double>(dim));
                return amp * rng.rademacher_vec(dim, u);
            }
            case DisturbanceKind::kGaussianClipped: {
                CounterRng rng(seed, Stream::kDisturbance);
                Vec w = (bound / (2.0 * std::sqrt(static_cast<double>(dim)))) *
                        rng.gaussian_vec(dim, u);
                const double n = w.norm();
                if (n > bound) w *= bound / n;
                return w;
            }
        }
        throw InvalidInputError("DisturbanceGen: unknown kind");
    }
};

inline DisturbanceGen make_disturbance(DisturbanceKind kind, int dim, double W,
                                       std::uint64_t seed, double period = 40.0) {
    if (dim < 1) throw ConfigError("dims", "state dimension must be positive");
    if (W < 0.0) throw ConfigError("W", "disturbance bound must be nonnegative");
    if (period <= 0.0) throw ConfigError("period", "period must be positive");
    DisturbanceGen g;
    g.kind = kind;
    g.dim = dim;
    g.bound = W;
    g.period = period;
    g.seed = seed;
    if (dim == 1) {
        g.frame = Mat::Ones(1, 1);
    } else {
        // two orthonormal directions fixed by the seed
        CounterRng rng(seed, Stream::kDisturbance, /*substream=*/1);
        Mat raw(dim, 2);
        raw.col(0) = rng.gaussian_vec(dim, 0);
        raw.col(1) = rng.gaussian_vec(dim, 1);
        Eigen::HouseholderQR<Mat> qr(raw);
        g.frame = Mat(qr.householderQ()).leftCols(2);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Cost adversaries (Assumption: convex, gradient bound G over radius D)

enum class CostKind {
    kQuadratic,
    kTimeVaryingQuadratic,
    kLinearPlusQuadratic,
    kCustom,  // convex callable without analytic gradients
};

using CostFn = std::function<double(std::int64_t, const Vec&, const Vec&)>;

struct CostGen {
    CostKind kind = CostKind::kQuadratic;
    Mat Q, R;  // symmetric PSD
    Vec q, r;  // linear terms, zero unless kLinearPlusQuadratic
    double mod_amp = 0.0;      // time-varying weight 1 + amp*sin(2*pi*t/period)
    double mod_period = 200.0;
    double G = 0.0;  // declared gradient-bound constant
    double D = 0.0;  // radius the bound is declared over
    CostFn custom;   // only for kCustom

    double scale_at(std::int64_t t) const {
        if (kind != CostKind::kTimeVaryingQuadratic) return 1.0;
        return 1.0 + mod_amp * std::sin(2.0 * std::numbers::pi *
                                        static_cast<double>(t) / mod_period);
    }

    double at(std::int64_t t, const Vec& x, const Vec& u) const {
        if (kind == CostKind::kCustom) return custom(t, x, u);
        const double s = scale_at(t);
        double c = s * (x.dot(Q * x) + u.dot(R * u));
        if (kind == CostKind::kLinearPlusQuadratic) c += q.dot(x) + r.dot(u);
        return c;
    }

    bool has_analytic_gradient() const { return kind != CostKind::kCustom; }

    Vec grad_x(std::int64_t t, const Vec& x, const Vec& /*u*/) const {
        Vec g = 2.0 * scale_at(t) * (Q * x);
        if (kind == CostKind::kLinearPlusQuadratic) g += q;
        return g;
    }

    Vec grad_u(std::int64_t t, const Vec& /*x*/, const Vec& u) const {
        Vec g = 2.0 * scale_at(t) * (R * u);
        if (kind == CostKind::kLinearPlusQuadratic) g += r;
        return g;
    }
};

namespace detail {
inline void require_sym_psd(const Mat& m, const char* name) {
    if (m.rows() != m.cols())
        throw ConfigError(name, "cost matrix must be square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw ConfigError(name, "cost matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    if (es.eigenvalues().minCoeff() < -1e-10 * scale)
        throw ConfigError(name, "cost matrix must be positive semidefinite");
}
}  // namespace detail

struct CostParams {
    Vec q, r;                  // linear terms
    double mod_amp = 0.5;      // time-varying modulation
    double mod_period = 200.0;
    double D = 10.0;
};

inline CostGen make_costs(CostKind kind, Mat Q, Mat R, const CostParams& p = {}) {
    detail::require_sym_psd(Q, "Q_cost");
    detail::require_sym_psd(R, "R_cost");
    if (kind == CostKind::kTimeVaryingQuadratic &&
        (p.mod_amp < 0.0 || p.mod_amp >= 1.0))
        throw ConfigError("mod_amp", "modulation amplitude must lie in [0, 1)");
    CostGen g;
    g.kind = kind;
    g.Q = std::move(Q);
    g.R = std::move(R);
    g.q = (kind == CostKind::kLinearPlusQuadratic && p.q.size() > 0)
              ? p.q
              : Vec::Zero(g.Q.rows());
    g.r = (kind == CostKind::kLinearPlusQuadratic && p.r.size() > 0)
              ? p.r
              : Vec::Zero(g.R.rows());
    if (g.q.size() != g.Q.rows()) throw ShapeError("make_costs: q dimension");
    if (g.r.size() != g.R.rows()) throw ShapeError("make_costs: r dimension");
    g.mod_amp = (kind == CostKind::kTimeVaryingQuadratic) ? p.mod_amp : 0.0;
    g.mod_period = p.mod_period;
    g.D = p.D;
    // gradient norm is measured blockwise: max(||grad_x||, ||grad_u||) <= G*D
    const double quad = 2.0 * (1.0 + g.mod_amp) *
                        std::max(spectral_norm(g.Q), spectral_norm(g.R));
    const double lin = std::max(g.q.norm(), g.r.norm()) / g.D;
    g.G = quad + lin;
    return g;
}

inline CostGen make_custom_costs(CostFn fn, int dx, int du, double G, double D) {
    CostGen g;
    g.kind = CostKind::kCustom;
    g.custom = std::move(fn);
    g.Q = Mat::Zero(dx, dx);
    g.R = Mat::Zero(du, du);
    g.q = Vec::Zero(dx);
    g.r = Vec::Zero(du);
    g.G = G;
    g.D = D;
    return g;
}

/// Spot check of the declared gradient bound on sampled points with
/// ||x||, ||u|| <= D (finite differences for custom costs).
inline bool gradient_bound_ok(const CostGen& c, std::uint64_t seed, int samples) {
    CounterRng rng(seed, Stream::kVerify);
    const int dx = static_cast<int>(c.Q.rows());
    const int du = static_cast<int>(c.R.rows());
    for (int s = 0; s < samples; ++s) {
        Vec x = rng.gaussian_vec(dx, 2 * s);
        Vec u = rng.gaussian_vec(du, 2 * s + 1);
        x *= c.D * rng.uniform01(1000 + s) / std::max(x.norm(), 1e-12);
        u *= c.D * rng.uniform01(2000 + s) / std::max(u.norm(), 1e-12);
        const std::int64_t t = static_cast<std::int64_t>(rng.word(3000 + s) % 10000);
        double gx, gu;
        if (c.has_analytic_gradient()) {
            gx = c.grad_x(t, x, u).norm();
            gu = c.grad_u(t, x, u).norm();
        } else {
            const double h = 1e-6;
            Vec dgx(dx), dgu(du);
            for (int i = 0; i < dx; ++i) {
                Vec xp = x, xm = x;
                xp(i) += h;
                xm(i) -= h;
                dgx(i) = (c.at(t, xp, u) - c.at(t, xm, u)) / (2 * h);
            }
            for (int i = 0; i < du; ++i) {
                Vec up = u, um = u;
                up(i) += h;
                um(i) -= h;
                dgu(i) = (c.at(t, x, up) - c.at(t, x, um)) / (2 * h);
            }
            gx = dgx.norm();
            gu = dgu.norm();
        }
        if (std::max(gx, gu) > c.G * c.D * (1.0 + 1e-6) + 1e-9) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Trajectories

struct Trajectory {
    std::vector<Vec> x;       // length steps+1
    std::vector<Vec> u;       // length steps
    std::vector<Vec> w;       // true disturbances, length steps
    std::vector<Vec> w_hat;   // estimated disturbances, empty or length steps
    std::vector<double> cost; // per-step costs, empty or length steps

    std::int64_t steps() const { return static_cast<std::int64_t>(u.size()); }

    double total_cost() const {
        double s = 0.0;
        for (double c : cost) s += c;
        return s;
    }
};

/// Bit-exact replay check: recomputes each transition with the same
/// expression and compares for equality.
inline bool replay_ok(const Trajectory& traj, const LinSystem& sys) {
    for (std::int64_t t = 0; t < traj.steps(); ++t) {
        const Vec expected = step(sys, traj.x[t], traj.u[t], traj.w[t]);
        if (!(expected.array() == traj.x[t + 1].array()).all()) return false;
    }
    return true;
}

using Controller = std::function<Vec(std::int64_t, const Vec&)>;

inline Trajectory rollout(const LinSystem& sys, const Controller& pi,
                          const DisturbanceGen& dist, const CostGen& costs,
                          std::int64_t T) {
    if (T < 1) throw InvalidInputError("rollout: horizon must be at least 1");
    Trajectory traj;
    traj.x.reserve(T + 1);
    traj.u.reserve(T);
    traj.w.reserve(T);
    traj.cost.reserve(T);
    Vec x = Vec::Zero(sys.state_dim());
    traj.x.push_back(x);
    for (std::int64_t t = 0; t < T; ++t) {
        Vec u = pi(t, x);
        if (u.size() != sys.control_dim())
            throw ShapeError("rollout: controller output dimension mismatch");
        const Vec w = dist.at(t);
        traj.cost.push_back(costs.at(t, x, u));
        Vec x_next = step(sys, x, u, w);
        traj.u.push_back(std::move(u));
        traj.w.push_back(w);
        traj.x.push_back(x_next);
        x = std::move(x_next);
    }
    return traj;
}

// Unrolled closed-loop state: sum_{i=0..t} A'^(t-i) (w_i + B u~_i), the state
// reached after t+1 steps from x_0 = 0 under u = -K x + u~ with A' = A - B K.
// Deliberately evaluated through explicit matrix powers so it is an
// independent path from rollout().
inline Vec unrolled_state(const Mat& a_prime, const Mat& b,
                          const std::vector<Vec>& w, const std::vector<Vec>& u_tilde,
                          std::int64_t t) {
    if (a_prime.rows() != a_prime.cols())
        throw ShapeError("unrolled_state: A' must be square");
    if (b.rows() != a_prime.rows())
        throw ShapeError("unrolled_state: B row mismatch");
    if (static_cast<std::int64_t>(w.size()) < t + 1 ||
        static_cast<std::int64_t>(u_tilde.size()) < t + 1)
        throw ShapeError("unrolled_state: sequences must cover indices 0..t");
    Vec s = Vec::Zero(a_prime.rows());
    for (std::int64_t i = 0; i <= t; ++i)
        s += mat_power(a_prime, t - i) * (w[i] + b * u_tilde[i]);
    return s;
}

// ---------------------------------------------------------------------------
// Strong stability

struct StabilityCertificate {
    Mat K;  // d_u x d_x
    Mat Q, L;
    double kappa = 1.0;
    double gamma = 0.5;
};

struct CheckEntry {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct StabilityReport {
    std::vector<CheckEntry> entries;
    bool pass = false;
};

/// Verifies the decomposition residual A - B K = Q L Q^-1 and the five norm
/// bounds; failures are reported, not thrown.
inline StabilityReport check_strong_stability(const LinSystem& sys,
                                              const StabilityCertificate& c) {
    StabilityReport rep;
    const Mat qinv = c.Q.fullPivLu().inverse();
    auto add = [&rep](std::string name, double value, double bound) {
        const bool ok = value <= bound + 1e-12;
        rep.entries.push_back({std::move(name), value, bound, ok});
    };
    add("decomposition_residual",
        spectral_norm(sys.A - sys.B * c.K - c.Q * c.L * qinv), 1e-8 * c.kappa);
    add("L_norm", spectral_norm(c.L), 1.0 - c.gamma);
    add("A_norm", spectral_norm(sys.A), c.kappa);
    add("B_norm", spectral_norm(sys.B), c.kappa);
    add("K_norm", spectral_norm(c.K), c.kappa);
    add("Q_norm", spectral_norm(c.Q), c.kappa);
    add("Qinv_norm", spectral_norm(qinv), c.kappa);
    rep.pass = true;
    for (const auto& e : rep.entries) rep.pass = rep.pass && e.pass;
    return rep;
}

// ---------------------------------------------------------------------------
// Strong controllability

/// C_k = [B, A'B, A'^2 B, ..., A'^(k-1) B], d_x x (k d_u).
inline Mat controllability_matrix(const Mat& a_prime, const Mat& b, int k) {
    if (k < 1) throw InvalidInputError("controllability_matrix: k must be >= 1");
    if (a_prime.rows() != a_prime.cols())
        throw ShapeError("controllability_matrix: A' must be square");
    if (b.rows() != a_prime.rows())
        throw ShapeError("controllability_matrix: B row mismatch");
    const int dx = static_cast<int>(b.rows());
    const int du = static_cast<int>(b.cols());
    Mat c(dx, k * du);
    Mat block = b;
    for (int j = 0; j < k; ++j) {
        c.middleCols(j * du, du) = block;
        if (j + 1 < k) block = a_prime * block;
    }
    return c;
}

struct ControllabilityReport {
    bool pass = false;
    double sigma = 0.0;           // sigma_min(C_k)
    double required_sigma = 0.0;  // sqrt(1/kappa_c)
    int k = 0;
};

/// Pass iff C_k has full row rank and sigma_min(C_k)^2 >= 1/kappa_c
/// (equivalently ||(C_k C_k^T)^-1|| <= kappa_c).
inline ControllabilityReport check_strong_controllability(const Mat& a_prime,
                                                          const Mat& b, int k,
                                                          double kappa_c) {
    ControllabilityReport rep;
    rep.k = k;
    const Mat c = controllability_matrix(a_prime, b, k);
    rep.sigma = (c.rows() <= c.cols()) ? sigma_min(c) : 0.0;
    rep.required_sigma = std::sqrt(1.0 / kappa_c);
    rep.pass = rep.sigma >= kRankTol &&
               rep.sigma * rep.sigma >= (1.0 / kappa_c) * (1.0 - 1e-12);
    return rep;
}

// ---------------------------------------------------------------------------
// Instance generator

struct SynthInstance {
    LinSystem sys;
    StabilityCertificate cert;
    int ctrl_k = 0;        // controllability window, = d_x
    double kappa_c = 0.0;  // 1 / sigma_min(C'_k)^2
    double sigma_ck = 0.0;
};

// Builds a certified (kappa, gamma)-strongly stable instance: L diagonal with
// entries uniform in [-(1-gamma), 1-gamma], Q with singular values inside
// [1/s, s] so cond(Q) <= kappa^2, then A = Q L Q^-1 + B K. Resamples until
// (A - B K, B) is strongly controllable with sigma_min(C'_k) >= sigma_floor.
// The default floor keeps downstream least-squares recovery well conditioned;
// single-input Krylov chains need a smaller floor.
inline SynthInstance synth_stable_instance(int dx, int du, double kappa,
                                           double gamma, std::uint64_t seed,
                                           int max_attempts = 200,
                                           double sigma_floor = 0.15) {
    if (dx < 1 || du < 1)
        throw ConfigError("dims", "dimensions must be positive");
    if (kappa < 1.0) throw ConfigError("kappa", "kappa must be at least 1");
    if (gamma <= 0.0 || gamma >= 1.0)
        throw ConfigError("gamma", "gamma must lie in (0, 1)");

    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        CounterRng rng(seed, Stream::kInstance, attempt);

        Mat L = Mat::Zero(dx, dx);
        for (int i = 0; i < dx; ++i)
            L(i, i) = rng.uniform(100 + i, -(1.0 - gamma), 1.0 - gamma);

        // scale for Q's singular values: keep ||Q||, ||Q^-1|| <= s and
        // s^2 (1-gamma) comfortably below kappa
        double s = std::min(std::max(1.0, 0.95 * kappa),
                            std::sqrt(0.8 * kappa / (1.0 - gamma)));
        s = std::max(s, 1.0);
        CounterRng rng_u1(seed, Stream::kInstance, 1000000 + attempt);
        CounterRng rng_u2(seed, Stream::kInstance, 2000000 + attempt);
        const Mat u1 = random_orthogonal(rng_u1, dx);
        const Mat u2 = random_orthogonal(rng_u2, dx);
        Vec sv(dx);
        for (int i = 0; i < dx; ++i)
            sv(i) = std::exp(rng.uniform(200 + i, std::log(1.0 / s), std::log(s)));
        const Mat q = u1 * sv.asDiagonal() * u2.transpose();
        const Mat qinv = u2 * sv.cwiseInverse().asDiagonal() * u1.transpose();

        CounterRng rng_b(seed, Stream::kInstance, 3000000 + attempt);
        Mat b = rng_b.gaussian_mat(dx, du);
        b *= 1.0 / spectral_norm(b);  // ||B|| = 1 <= kappa

        const double margin = kappa - s * s * (1.0 - gamma);
        CounterRng rng_k(seed, Stream::kInstance, 4000000 + attempt);
        Mat k_mat = rng_k.gaussian_mat(du, dx);
        k_mat *= std::min(kappa, 0.45 * margin) / spectral_norm(k_mat);

        const Mat a_prime = q * L * qinv;
        const Mat a = a_prime + b * k_mat;

        LinSystem sys(a, b);
        StabilityCertificate cert{k_mat, q, L, kappa, gamma};
        if (!check_strong_stability(sys, cert).pass) continue;

        const int k_window = dx;
        const Mat ck = controllability_matrix(a_prime, b, k_window);
        const double sigma = (ck.rows() <= ck.cols()) ? sigma_min(ck) : 0.0;
        if (sigma < sigma_floor) continue;

        SynthInstance inst;
        inst.sys = std::move(sys);
        inst.cert = std::move(cert);
        inst.ctrl_k = k_window;
        inst.sigma_ck = sigma;
        inst.kappa_c = 1.0 / (sigma * sigma);
        return inst;
    }
    throw GenerationError("synth_stable_instance: resampling budget exhausted");
}

// ---------------------------------------------------------------------------
// Control lifting (closed-loop controllability to open-loop controllability)

struct LiftResult {
    std::vector<Vec> blocks;  // u_0..u_{k-1} in C_k block order
    Vec stacked;              // same, flattened (k d_u)
    double norm_ratio = 0.0;  // ||u|| / ||x||
    double residual_rel = 0.0;
};

// Solves C'_k u' = x (min-norm) on the closed loop (A - B K, B), then converts
// through the closed-loop state correspondence: with controls taken in
// application order, a_j = a'_j - K z_j where z_0 = 0 and
// z_{j+1} = (A - B K) z_j + B a'_j. The returned stack satisfies C_k u = x.
// Block index i multiplies A^i B, so application order is reversed block order.
inline LiftResult lift_controls(const LinSystem& sys, const Mat& k_mat, int k,
                                const Vec& x_target) {
    if (x_target.size() != sys.A.rows())
        throw ShapeError("lift_controls: target dimension mismatch");
    const Mat a_prime = sys.A - sys.B * k_mat;
    const Mat cp = controllability_matrix(a_prime, sys.B, k);
    const double sigma = (cp.rows() <= cp.cols()) ? sigma_min(cp) : 0.0;
    if (sigma < kRankTol)
        throw PreconditionError(
            "lift_controls: (A - BK, B) fails the strong controllability "
            "precondition (sigma_min=" + std::to_string(sigma) + ")");

    const int du = sys.control_dim();
    Eigen::JacobiSVD<Mat> svd(cp, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec u_prime_stack = svd.matrixV() *
                              svd.singularValues().cwiseInverse().asDiagonal() *
                              (svd.matrixU().transpose() * x_target);

    // closed-loop recursion in application order (block k-1 acts first)
    std::vector<Vec> open_blocks(k);
    Vec z = Vec::Zero(sys.state_dim());
    for (int j = 0; j < k; ++j) {
        const Vec a_prime_j = u_prime_stack.segment((k - 1 - j) * du, du);
        open_blocks[k - 1 - j] = a_prime_j - k_mat * z;
        z = a_prime * z + sys.B * a_prime_j;
    }

    LiftResult res;
    res.blocks = std::move(open_blocks);
    res.stacked = Vec(k * du);
    for (int i = 0; i < k; ++i) res.stacked.segment(i * du, du) = res.blocks[i];
    const double xn = x_target.norm();
    res.norm_ratio = (xn > 0.0) ? res.stacked.norm() / xn : 0.0;
    const Mat ck = controllability_matrix(sys.A, sys.B, k);
    res.residual_rel = (ck * res.stacked - x_target).norm() / std::max(xn, 1e-300);
    return res;
}

}  // namespace nsc::lds
