#include "specml/stepper.hpp"

#include <cmath>
#include <cstdio>

#include "specml/fft.hpp"
#include "specml/imex.hpp"

namespace specml {

namespace {

std::string format_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", t);
    return buf;
}

using TendencyCorrection = std::function<SpectralState(const SpectralState&)>;

/// Production backend for the IMEX template: complex coefficient arrays,
/// eager evaluation, real linear symbol.
class SpectralOps {
  public:
    using State = SpectralState;

    SpectralOps(const EquationSpec& spec, const StepperConfig& cfg,
                const TendencyCorrection* correction)
        : spec_(spec), correction_(correction) {
        if (cfg.filter_enabled)
            factors_ = filter_factors(spec.grid, cfg.filter, cfg.filter_mode);
    }

    State tendency(const State& u) {
        State t = nonlinear_tendency(spec_, u);
        if (correction_) {
            State c = (*correction_)(u);
            if (c.grid != u.grid || c.num_channels() != u.num_channels())
                throw std::invalid_argument(
                    "correction output shape does not match state");
            for (int i = 0; i < n(); ++i) t.channels[0][i] -= c.channels[0][i];
        }
        return t;
    }

    State cn_solve(const State& u, const State& t, double a) {
        State out = u;
        for (int c = 0; c < u.num_channels(); ++c)
            for (int i = 0; i < n(); ++i) {
                double half = 0.5 * a * spec_.linear_symbol[i];
                out.channels[c][i] = ((1.0 + half) * u.channels[c][i] +
                                      a * t.channels[c][i]) /
                                     (1.0 - half);
            }
        return out;
    }

    State euler_solve(const State& u, const State& t, double h) {
        State out = u;
        for (int c = 0; c < u.num_channels(); ++c)
            for (int i = 0; i < n(); ++i)
                out.channels[c][i] =
                    u.channels[c][i] +
                    h * (spec_.linear_symbol[i] * u.channels[c][i] +
                         t.channels[c][i]);
        return out;
    }

    State combine(const State& n1, const State& n2, const State& n3,
                  const State& n4) {
        State s = n1;
        for (int c = 0; c < n1.num_channels(); ++c)
            for (int i = 0; i < n(); ++i)
                s.channels[c][i] =
                    (n1.channels[c][i] + 2.0 * n2.channels[c][i] +
                     2.0 * n3.channels[c][i] + n4.channels[c][i]) /
                    6.0;
        return s;
    }

    State filter(const State& s) {
        if (factors_.empty()) return s;
        State out = s;
        for (auto& ch : out.channels)
            for (int i = 0; i < n(); ++i) ch[i] *= factors_[i];
        return out;
    }

  private:
    int n() const { return spec_.grid.num_points(); }

    const EquationSpec& spec_;
    const TendencyCorrection* correction_;
    std::vector<double> factors_;
};

SpectralState step_with(const EquationSpec& spec, const SpectralState& state,
                        const StepperConfig& cfg,
                        const TendencyCorrection* correction) {
    if (state.grid != spec.grid)
        throw std::invalid_argument("state grid does not match equation grid");
    if (!(cfg.dt > 0)) throw std::invalid_argument("dt must be positive");

    SpectralOps ops(spec, cfg, correction);
    SpectralState out = cfg.scheme == Scheme::imex_cn_rk4
                            ? imex_cn_rk4_step(ops, state, cfg.dt)
                            : forward_euler_step(ops, state, cfg.dt);
    out.time = state.time + cfg.dt;
    if (!all_finite(out)) throw SolverDivergence(out.time);
    return out;
}

}  // namespace

SolverDivergence::SolverDivergence(double t)
    : std::runtime_error("solver diverged at t=" + format_time(t)), time(t) {}

SpectralState physics_step(const EquationSpec& spec, const SpectralState& state,
                           const StepperConfig& cfg) {
    return step_with(spec, state, cfg, nullptr);
}

SpectralState hybrid_step(const EquationSpec& spec, const SpectralState& state,
                          const StepperConfig& cfg,
                          const CorrectionFn& correction) {
    if (correction.mode == CorrectionMode::none)
        return physics_step(spec, state, cfg);
    if (correction.mode != CorrectionMode::split_operator)
        throw std::invalid_argument(
            "hybrid step requires a split-operator correction");

    SpectralState out = physics_step(spec, state, cfg);
    SpectralState c = correction.fn(state);
    if (c.grid != state.grid || c.num_channels() != state.num_channels())
        throw std::invalid_argument(
            "correction output shape does not match state");
    for (int ch = 0; ch < out.num_channels(); ++ch)
        for (int i = 0; i < state.grid.num_points(); ++i)
            out.channels[ch][i] += cfg.dt * c.channels[ch][i];
    if (!all_finite(out)) throw SolverDivergence(out.time);
    return out;
}

SpectralState nonlinear_corrected_step(const EquationSpec& spec,
                                       const SpectralState& state,
                                       const StepperConfig& cfg,
                                       const CorrectionFn& correction) {
    if (spec.grid.dims != 2)
        throw std::invalid_argument(
            "nonlinear-term correction requires a 2D equation");
    if (correction.mode == CorrectionMode::none)
        return physics_step(spec, state, cfg);
    if (correction.mode != CorrectionMode::nonlinear_term)
        throw std::invalid_argument(
            "nonlinear_corrected_step requires a nonlinear_term correction");
    return step_with(spec, state, cfg, &correction.fn);
}

double stable_time_step(const Grid& grid, double v_max, double safety) {
    if (!(v_max > 0)) throw std::invalid_argument("v_max must be positive");
    if (!(safety > 0) || safety > 1)
        throw std::invalid_argument("cfl safety must be in (0, 1]");
    return safety * grid.spacing() / v_max;
}

double real_space_max(const SpectralState& state) {
    double m = 0.0;
    std::vector<Complex> buf(state.grid.num_points());
    for (const auto& ch : state.channels) {
        buf = ch;
        fft_inverse(state.grid, buf.data(), buf.data());
        for (const Complex& z : buf) m = std::max(m, std::abs(z.real()));
    }
    return m;
}

namespace {

void warn_if_cfl_violated(const EquationSpec& spec, const SpectralState& state,
                          const StepperConfig& cfg) {
    double v_max = 0.0;
    if (spec.grid.dims == 1) {
        v_max = real_space_max(state);
    } else if (state.num_channels() == 1) {
        v_max = real_space_max(velocity_solve(state));
    }
    if (v_max <= 0.0) return;
    double bound = stable_time_step(spec.grid, v_max, cfg.cfl_safety);
    if (cfg.dt > bound)
        std::fprintf(stderr, "warning: dt=%g exceeds CFL bound %g at t=%g\n",
                     cfg.dt, bound, state.time);
}

}  // namespace

UnrollResult unroll(const EquationSpec& spec, const SpectralState& state,
                    const StepperConfig& cfg, const CorrectionFn& correction,
                    int n_steps, int stride) {
    if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");
    warn_if_cfl_violated(spec, state, cfg);

    UnrollResult result;
    result.states.reserve((n_steps + stride - 1) / stride);
    SpectralState current = state;
    for (int s = 1; s <= n_steps; ++s) {
        try {
            switch (correction.mode) {
                case CorrectionMode::none:
                    current = physics_step(spec, current, cfg);
                    break;
                case CorrectionMode::split_operator:
                    current = hybrid_step(spec, current, cfg, correction);
                    break;
                case CorrectionMode::nonlinear_term:
                    current =
                        nonlinear_corrected_step(spec, current, cfg, correction);
                    break;
            }
        } catch (const SolverDivergence&) {
            result.diverged = true;
            break;
        }
        if (real_space_max(current) > 1e6) {
            result.diverged = true;
            break;
        }
        result.last_finite_step = s;
        if (s % stride == 0 || s == n_steps) result.states.push_back(current);
    }
    return result;
}

}  // namespace specml
