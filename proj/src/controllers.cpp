#include "gfmts/controllers.hpp"

#include "gfmts/mpc.hpp"
#include "gfmts/phasor_core.hpp"

#include <cmath>

namespace gfmts {

namespace {

class OriginalStrategy final : public Strategy {
public:
    std::string_view name() const override { return "original"; }
    ControlInput tick(const TickContext&) override { return {}; }
};

class FrequencyBoundStrategy final : public Strategy {
public:
    explicit FrequencyBoundStrategy(double bound) : bound_(bound) {
        if (!(bound > 0.0)) throw ParameterError("delta_omega_max must be positive");
    }
    std::string_view name() const override { return "freq_bound"; }
    ControlInput tick(const TickContext&) override { return {}; }
    std::optional<double> omega_bound() const override { return bound_; }

private:
    double bound_;
};

class CompensationStrategy final : public Strategy {
public:
    std::string_view name() const override { return "compensation"; }
    ControlInput tick(const TickContext& ctx) override {
        if (ctx.state.mode != Mode::Saturated) return {};
        const double p_unsat = unsaturated_power(ctx.state.theta, ctx.v_ref, ctx.grid);
        const double p_sat =
            saturated_power(ctx.state.theta, ctx.grid, *ctx.params, ctx.state.omega);
        return {-(p_unsat - p_sat), 0.0};
    }
};

class Cl0Strategy final : public Strategy {
public:
    explicit Cl0Strategy(double dp_max) : dp_max_(dp_max) {
        if (!(dp_max > 0.0)) throw ParameterError("delta_p_ref_max must be positive");
    }
    std::string_view name() const override { return "cl0"; }
    ControlInput tick(const TickContext& ctx) override {
        if (ctx.state.mode != Mode::Saturated) return {};
        return {-dp_max_, 0.0};
    }

private:
    double dp_max_;
};

class MpcStrategy final : public Strategy {
public:
    MpcStrategy(const mpc::MpcConfig& config, const GridCondition& believed_grid,
                const SystemParams& params, double v_ref, std::optional<double> bound)
        : rolling_(config, believed_grid, params, v_ref), bound_(bound) {}

    std::string_view name() const override { return "mpc"; }
    std::optional<double> omega_bound() const override { return bound_; }
    const std::vector<mpc::SolveLogRow>* solve_log() const override { return &rolling_.log(); }
    void reset() override { rolling_.reset(); }

    ControlInput tick(const TickContext& ctx) override {
        // Corrective action only in post-fault current saturation; the
        // rolling program is retired as soon as normal operation returns.
        if (ctx.fault_active || ctx.state.mode != Mode::Saturated) {
            rolling_.idle();
            return {};
        }
        return rolling_.tick(ctx.state);
    }

    mpc::RollingMpc& rolling() { return rolling_; }

private:
    mpc::RollingMpc rolling_;
    std::optional<double> bound_;
};

} // namespace

std::unique_ptr<Strategy> make_original() { return std::make_unique<OriginalStrategy>(); }

std::unique_ptr<Strategy> make_frequency_bound(double delta_omega_max) {
    return std::make_unique<FrequencyBoundStrategy>(delta_omega_max);
}

std::unique_ptr<Strategy> make_compensation() {
    return std::make_unique<CompensationStrategy>();
}

std::unique_ptr<Strategy> make_cl0(double delta_p_ref_max) {
    return std::make_unique<Cl0Strategy>(delta_p_ref_max);
}

std::unique_ptr<Strategy> make_mpc(const mpc::MpcConfig& config,
                                   const GridCondition& believed_grid,
                                   const SystemParams& params, double v_ref,
                                   std::optional<double> omega_bound) {
    return std::make_unique<MpcStrategy>(config, believed_grid, params, v_ref, omega_bound);
}

} // namespace gfmts
