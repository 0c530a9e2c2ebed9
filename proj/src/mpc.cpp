#include "gfmts/mpc.hpp"

#include "gfmts/numerics.hpp"
#include "gfmts/phasor_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gfmts {
namespace mpc {

namespace {

constexpr double kOmega0 = 1.0;
constexpr double kFeasTol = 1e-6;
constexpr double kStartSlack = 0.01; // rad tolerated above theta_zc before refusing

struct Rollout {
    std::vector<double> theta;   // K+1
    std::vector<double> omega;   // K+1
    std::vector<double> dtc;     // K+1 cumulative corrective phase
    std::vector<double> p;       // K applied power corrections
    double objective = 0.0;
    double residual = 0.0;       // max violation of the coupled constraints
};

// Free-variable layout for a fixed switch step s:
//   x[0 .. s-2]      = delta_p_ref(1 .. s-1)
//   x[s-1 .. 2s-2]   = jump increments d(0 .. s-1)
// Steps k >= s run in Normal mode with forced-zero corrections.
int p_count(int s) { return std::max(0, s - 1); }
int d_count(int s) { return std::max(0, s); }

Rollout roll(const MpcProblem& pb, const Transcription& tr, int s,
             const std::vector<double>& x) {
    const int k = tr.k;
    const double td = pb.config.step_td;
    const double two_h = 2.0 * pb.params.h;

    Rollout r;
    r.theta.resize(k + 1);
    r.omega.resize(k + 1);
    r.dtc.resize(k + 1);
    r.p.assign(k, 0.0);
    r.theta[0] = pb.theta0;
    r.omega[0] = pb.omega0;
    r.dtc[0] = pb.delta_theta_c0;

    double viol = 0.0;
    const auto note = [&viol](double v) { viol = std::max(viol, v); };

    for (int i = 0; i < k; ++i) {
        const bool normal = i >= s;
        double p_ref = 0.0;
        double d = 0.0;
        if (!normal) {
            p_ref = i == 0 ? pb.delta_p_ref0 : x[i - 1];
            d = x[p_count(s) + i];
        }
        r.p[i] = p_ref;

        const double power = normal
                                 ? tr.p_unsat_gain * std::sin(r.theta[i])
                                 : tr.p_sat_gain * std::cos(r.theta[i] + tr.beta);
        double omega_next = r.omega[i]
                            + td / two_h
                                  * (pb.params.p0 + p_ref - power
                                     - (r.omega[i] - kOmega0) / pb.params.d_p);
        if (pb.config.omega_bound) {
            const double b = *pb.config.omega_bound;
            omega_next = std::clamp(omega_next, kOmega0 - b, kOmega0 + b);
        }
        const double dtheta = d + td * pb.params.omega_n * (r.omega[i] - kOmega0);
        r.theta[i + 1] = r.theta[i] + dtheta;
        r.omega[i + 1] = omega_next;
        r.dtc[i + 1] = r.dtc[i] + d;

        // Per-step angle tracking limits.
        note(pb.config.delta_theta_min - dtheta);
        note(dtheta - pb.config.delta_theta_max);
        // Frequency and safe-angle boxes on the new state.
        note(pb.config.omega_min - r.omega[i + 1]);
        note(r.omega[i + 1] - pb.config.omega_max);
        note(-r.theta[i + 1]);
        note(r.theta[i + 1] - pb.config.theta_zc);
        // Mode consistency with the fixed binary sequence.
        if (normal) {
            note(r.theta[i] - tr.theta_sat);
        } else {
            note(tr.theta_sat - r.theta[i]);
        }
    }
    double obj = 0.0;
    for (int i = 0; i < k; ++i) {
        const double dev = r.theta[i] - tr.theta_eq;
        obj += dev * dev;
    }
    r.objective = obj;
    r.residual = std::max(viol, 0.0);
    return r;
}

// Shooting objective with a quadratic penalty on every state constraint.
double penalized(const MpcProblem& pb, const Transcription& tr, int s,
                 const std::vector<double>& x, double mu) {
    const Rollout r = roll(pb, tr, s, x);
    const int k = tr.k;
    double pen = 0.0;
    const auto add = [&pen](double v) {
        if (v > 0.0) pen += v * v;
    };
    for (int i = 0; i < k; ++i) {
        const double dtheta = r.theta[i + 1] - r.theta[i];
        add(pb.config.delta_theta_min - dtheta);
        add(dtheta - pb.config.delta_theta_max);
        add(pb.config.omega_min - r.omega[i + 1]);
        add(r.omega[i + 1] - pb.config.omega_max);
        add(-r.theta[i + 1]);
        add(r.theta[i + 1] - pb.config.theta_zc);
        if (i >= s) {
            add(r.theta[i] - tr.theta_sat);
        } else {
            add(tr.theta_sat - r.theta[i]);
        }
    }
    return r.objective + mu * pen;
}

struct BranchResult {
    bool attempted = false;
    bool feasible = false;
    double objective = std::numeric_limits<double>::infinity();
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;
    std::vector<double> x;
};

BranchResult solve_branch(const MpcProblem& pb, const Transcription& tr, int s,
                          const std::vector<double>* warm_p,
                          const std::vector<double>* warm_d) {
    BranchResult best;
    best.attempted = true;
    const int np = p_count(s);
    const int nd = d_count(s);
    const int nv = np + nd;

    // Pinned step-0 power correction must respect the mode contract.
    if (s == 0 && std::abs(pb.delta_p_ref0) > kFeasTol) return best;
    if (s > 0 && std::abs(pb.delta_p_ref0) > pb.config.delta_p_ref_max + kFeasTol) return best;

    std::vector<double> lo(nv), hi(nv);
    for (int i = 0; i < np; ++i) {
        lo[i] = -pb.config.delta_p_ref_max;
        hi[i] = pb.config.delta_p_ref_max;
    }
    for (int i = 0; i < nd; ++i) {
        lo[np + i] = -pb.config.delta_theta_chg_max;
        hi[np + i] = 0.0;
    }

    std::vector<std::vector<double>> starts;
    {
        std::vector<double> cl0(nv, 0.0);
        for (int i = 0; i < np; ++i) cl0[i] = -pb.config.delta_p_ref_max;
        starts.push_back(std::move(cl0)); // CL0 rollout: full brake, no jumps
        starts.emplace_back(nv, 0.0);
        std::vector<double> bang(nv, 0.0);
        for (int i = 0; i < np; ++i) bang[i] = -pb.config.delta_p_ref_max;
        for (int i = 0; i < nd; ++i) bang[np + i] = -pb.config.delta_theta_chg_max;
        starts.push_back(std::move(bang));
        // Coarse-grid seeds thread narrow mode-consistency corridors that
        // descent from the corner starts can miss. Only worthwhile (and
        // affordable) for small branches.
        if (nv > 0 && nv <= 8) {
            const int levels = nv <= 3 ? 9 : (nv <= 5 ? 7 : (nv <= 6 ? 5 : 3));
            long combos = 1;
            for (int i = 0; i < nv; ++i) combos *= levels;
            std::vector<double> x(nv, 0.0);
            std::vector<double> seed;
            double seed_res = std::numeric_limits<double>::infinity();
            double seed_obj = std::numeric_limits<double>::infinity();
            for (long code = 0; code < combos; ++code) {
                long rem = code;
                for (int i = 0; i < nv; ++i) {
                    const int lvl = int(rem % levels);
                    rem /= levels;
                    x[i] = lo[i] + (hi[i] - lo[i]) * double(lvl) / double(levels - 1);
                }
                const Rollout r = roll(pb, tr, s, x);
                const bool feas = r.residual <= kFeasTol;
                const bool seed_feas = seed_res <= kFeasTol;
                const bool better = seed.empty()
                                    || (feas && !seed_feas)
                                    || (feas == seed_feas
                                        && (feas ? r.objective < seed_obj
                                                 : r.residual < seed_res));
                if (better) {
                    seed = x;
                    seed_res = r.residual;
                    seed_obj = r.objective;
                }
            }
            if (!seed.empty()) starts.push_back(std::move(seed));
        }
        if (warm_p && warm_d) {
            // Shift the previous rolling solution by one step: new step k
            // lines up with old step k+1 (x[i] holds delta_p_ref(i+1)).
            std::vector<double> w(nv, 0.0);
            for (int i = 0; i < np; ++i) {
                const std::size_t src = std::size_t(i + 2);
                w[i] = src < warm_p->size() ? std::clamp((*warm_p)[src], lo[i], hi[i]) : 0.0;
            }
            for (int i = 0; i < nd; ++i) {
                const std::size_t src = std::size_t(i + 1);
                w[np + i] =
                    src < warm_d->size() ? std::clamp((*warm_d)[src], lo[np + i], hi[np + i]) : 0.0;
            }
            starts.push_back(std::move(w));
        }
    }

    const auto consider = [&](const std::vector<double>& x, int iters) {
        const Rollout r = roll(pb, tr, s, x);
        const bool feas = r.residual <= kFeasTol;
        bool better;
        if (feas != best.feasible) {
            better = feas;
        } else if (feas) {
            better = r.objective < best.objective;
        } else {
            better = r.residual < best.residual;
        }
        if (better) {
            best.feasible = feas;
            best.objective = r.objective;
            best.residual = r.residual;
            best.x = x;
        }
        best.iterations += iters;
    };

    const int budget = std::max(20, pb.config.inner_max_iter);
    for (const auto& x0 : starts) {
        consider(x0, 0); // raw start is always a candidate (CL0 guarantee)
        if (nv == 0) continue;
        std::vector<double> x = x0;
        for (double mu : {1e2, 1e4, 1e6}) {
            const auto obj = [&](const std::vector<double>& v) {
                return penalized(pb, tr, s, v, mu);
            };
            const BoxMinimizeResult m = minimize_box(obj, x, lo, hi, budget);
            x = m.x;
            consider(x, m.iterations);
        }
    }
    // Refinement from the incumbent sharpens active-constraint optima.
    if (nv > 0 && !best.x.empty()) {
        std::vector<double> x = best.x;
        for (double mu : {1e6, 1e8}) {
            const auto obj = [&](const std::vector<double>& v) {
                return penalized(pb, tr, s, v, mu);
            };
            const BoxMinimizeResult m = minimize_box(obj, x, lo, hi, budget);
            x = m.x;
            consider(x, m.iterations);
        }
        // Coordinate-wise golden-section sweeps finish off penalty-valley
        // floors where the quasi-Newton steps stall.
        const auto obj = [&](const std::vector<double>& v) {
            return penalized(pb, tr, s, v, 1e7);
        };
        const double gr = 0.6180339887498949;
        for (int sweep = 0; sweep < 3; ++sweep) {
            for (int j = 0; j < nv; ++j) {
                const double span = (hi[j] - lo[j]) * (sweep == 0 ? 0.25 : 0.05);
                double a = std::max(lo[j], x[j] - span);
                double b = std::min(hi[j], x[j] + span);
                double c = b - gr * (b - a);
                double d = a + gr * (b - a);
                auto eval = [&](double v) {
                    const double keep = x[j];
                    x[j] = v;
                    const double r = obj(x);
                    x[j] = keep;
                    return r;
                };
                double fc = eval(c);
                double fd = eval(d);
                for (int it = 0; it < 40 && (b - a) > 1e-12; ++it) {
                    if (fc < fd) {
                        b = d;
                        d = c;
                        fd = fc;
                        c = b - gr * (b - a);
                        fc = eval(c);
                    } else {
                        a = c;
                        c = d;
                        fc = fd;
                        d = a + gr * (b - a);
                        fd = eval(d);
                    }
                }
                const double cand = 0.5 * (a + b);
                if (eval(cand) < obj(x)) x[j] = cand;
            }
            consider(x, nv);
        }
    }
    return best;
}

} // namespace

int MpcConfig::horizon_steps() const {
    const double ratio = horizon_t / step_td;
    const int k = int(std::lround(ratio));
    if (k <= 0 || std::abs(ratio - double(k)) > 1e-9) {
        throw ParameterError("horizon_t must be a positive integer multiple of step_td");
    }
    return k;
}

void MpcConfig::validate() const {
    horizon_steps();
    if (!(omega_min < kOmega0 && kOmega0 < omega_max)) {
        throw ParameterError("omega bounds must straddle the nominal frequency");
    }
    if (big_m < 2.0 * kPi - 1e-12) {
        throw ParameterError("big_m must be at least 2*pi");
    }
    if (delta_p_ref_max <= 0.0 || delta_theta_chg_max < 0.0) {
        throw ParameterError("corrective input bounds must be positive");
    }
    if (!(delta_theta_min < delta_theta_max)) {
        throw ParameterError("delta_theta bounds are inverted");
    }
    if (theta_zc <= 0.0) throw ParameterError("theta_zc must be positive");
}

double equilibrium_angle(const SystemParams& params, const GridCondition& grid,
                         double v_ref) {
    grid.validate();
    if (v_ref <= 0.0 || grid.v_g <= 0.0) {
        throw DomainError("voltages must be positive");
    }
    const double arg = params.p0 * grid.x() / (grid.v_g * v_ref);
    if (std::abs(arg) > 1.0) {
        throw NoEquilibriumError("post-fault grid cannot carry the reference power");
    }
    return std::asin(arg);
}

Transcription transcribe(const MpcProblem& problem) {
    problem.config.validate();
    problem.grid.validate();
    require_finite(problem.theta0, "theta0");
    require_finite(problem.omega0, "omega0");

    Transcription tr;
    tr.k = problem.config.horizon_steps();
    tr.theta_sat = theta_sat(problem.v_ref, problem.grid, problem.params, problem.omega0);
    tr.theta_eq = equilibrium_angle(problem.params, problem.grid, problem.v_ref);
    tr.beta = problem.params.beta;
    tr.p_unsat_gain = problem.grid.v_g * problem.v_ref / problem.grid.x();
    const double c = problem.params.c_f * problem.params.omega_n * problem.omega0;
    const double denom = 1.0 - problem.grid.x() * c;
    if (denom <= 0.0) throw ParameterError("1 - X*C*omega_n*omega must be positive");
    tr.p_sat_gain = problem.params.i_s_max * problem.grid.v_g / denom;
    return tr;
}

bool big_m_admits(int n, double theta, double theta_sat, double big_m) {
    const double gap = theta_sat - theta;
    return gap <= big_m * n && -big_m * (1 - n) <= gap;
}

MpcSolution solve(const MpcProblem& problem, const std::vector<double>* warm_p,
                  const std::vector<double>* warm_d) {
    MpcProblem pb = problem;
    MpcSolution sol;

    if (pb.theta0 > pb.config.theta_zc + kStartSlack || pb.theta0 < -kStartSlack) {
        sol.status = SolveStatus::UnsafeStart;
        return sol;
    }
    if (pb.theta0 > pb.config.theta_zc) {
        pb.theta0 = pb.config.theta_zc - 1e-9;
        sol.start_clamped = true;
    }
    if (pb.theta0 < 0.0) {
        pb.theta0 = 0.0;
        sol.start_clamped = true;
    }

    const Transcription tr = transcribe(pb);
    const int k = tr.k;

    int best_s = -1;
    BranchResult best;
    for (int s = 0; s <= k; ++s) {
        const BranchResult br = solve_branch(pb, tr, s, warm_p, warm_d);
        sol.iterations += br.iterations;
        if (!br.feasible) continue;
        if (best_s < 0 || br.objective < best.objective) {
            best = br;
            best_s = s;
        }
    }

    if (best_s < 0) {
        sol.status = SolveStatus::Infeasible;
        return sol;
    }

    const Rollout r = roll(pb, tr, best_s, best.x);
    sol.theta = r.theta;
    sol.omega = r.omega;
    sol.delta_theta_c = r.dtc;
    sol.delta_p_ref = r.p;
    sol.n.resize(k);
    for (int i = 0; i < k; ++i) sol.n[i] = i >= best_s ? 1 : 0;
    sol.objective = r.objective;
    sol.residual = r.residual;
    sol.switch_step = best_s;
    sol.status = SolveStatus::Optimal;
    return sol;
}

RollingMpc::RollingMpc(const MpcConfig& config, const GridCondition& believed_grid,
                       const SystemParams& params, double v_ref)
    : config_(config), grid_(believed_grid), params_(params), v_ref_(v_ref) {
    config_.validate();
    grid_.validate();
}

void RollingMpc::reset() {
    pending_ = ControlInput{};
    active_ = false;
    cum_delta_theta_c_ = 0.0;
    tick_count_ = 0;
    have_warm_ = false;
    log_.clear();
}

void RollingMpc::idle() {
    // Corrective phase stays frozen at its last value; a later saturation
    // episode starts again with the delay contract.
    pending_ = ControlInput{};
    active_ = false;
    have_warm_ = false;
}

ControlInput RollingMpc::tick(const ApcState& measured) {
    ControlInput out = active_ ? pending_ : ControlInput{};
    active_ = true;
    pending_ = ControlInput{};
    cum_delta_theta_c_ += out.delta_theta_c;
    ++tick_count_;

    MpcProblem pb;
    pb.theta0 = measured.theta + out.delta_theta_c; // state right after the jump
    pb.omega0 = measured.omega;
    pb.delta_theta_c0 = cum_delta_theta_c_;
    pb.delta_p_ref0 = out.delta_p_ref;
    pb.grid = grid_;
    pb.params = params_;
    pb.v_ref = v_ref_;
    pb.config = config_;

    MpcSolution s;
    try {
        s = solve(pb, have_warm_ ? &warm_p_ : nullptr, have_warm_ ? &warm_d_ : nullptr);
    } catch (const std::exception&) {
        s.status = SolveStatus::Infeasible;
    }

    SolveLogRow row;
    row.tick = tick_count_;
    row.switch_step = s.switch_step;
    row.objective = s.objective;
    row.feasible = s.status == SolveStatus::Optimal;
    row.iterations = s.iterations;
    row.residual = s.residual;
    log_.push_back(row);

    if (s.status == SolveStatus::Optimal && s.theta.size() >= 2) {
        pending_.delta_p_ref = s.delta_p_ref.size() > 1 ? s.delta_p_ref[1] : 0.0;
        pending_.delta_theta_c = s.delta_theta_c[1] - s.delta_theta_c[0];
        warm_p_ = s.delta_p_ref;
        warm_d_.assign(s.delta_theta_c.size() - 1, 0.0);
        for (std::size_t i = 0; i + 1 < s.delta_theta_c.size(); ++i) {
            warm_d_[i] = s.delta_theta_c[i + 1] - s.delta_theta_c[i];
        }
        have_warm_ = true;
    } else {
        // Stale/failed solve: fall back to the always-feasible law.
        pending_.delta_p_ref = -config_.delta_p_ref_max;
        pending_.delta_theta_c = 0.0;
        have_warm_ = false;
    }
    return out;
}

} // namespace mpc
} // namespace gfmts
