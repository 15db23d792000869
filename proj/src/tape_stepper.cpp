#include "specml/tape_stepper.hpp"

#include <stdexcept>

#include "specml/imex.hpp"
#include "specml/spectral_ops.hpp"

namespace specml {

namespace {

Symbol cn_gain(const std::vector<double>& lambda, double a) {
    std::vector<double> s(lambda.size());
    for (size_t i = 0; i < s.size(); ++i) {
        double half = 0.5 * a * lambda[i];
        s[i] = (1.0 + half) / (1.0 - half);
    }
    return make_symbol(s);
}

Symbol cn_tend(const std::vector<double>& lambda, double a) {
    std::vector<double> s(lambda.size());
    for (size_t i = 0; i < s.size(); ++i)
        s[i] = a / (1.0 - 0.5 * a * lambda[i]);
    return make_symbol(s);
}

}  // namespace

TapeStepper::TapeStepper(const EquationSpec& spec, const StepperConfig& cfg)
    : spec_(spec), cfg_(cfg) {
    if (!(cfg.dt > 0)) throw std::invalid_argument("dt must be positive");
    const Grid& grid = spec_.grid;

    cn_gain_half_ = cn_gain(spec_.linear_symbol, cfg.dt / 2);
    cn_tend_half_ = cn_tend(spec_.linear_symbol, cfg.dt / 2);
    cn_gain_full_ = cn_gain(spec_.linear_symbol, cfg.dt);
    cn_tend_full_ = cn_tend(spec_.linear_symbol, cfg.dt);
    {
        std::vector<double> e(spec_.linear_symbol.size());
        for (size_t i = 0; i < e.size(); ++i)
            e[i] = 1.0 + cfg.dt * spec_.linear_symbol[i];
        euler_gain_ = make_symbol(e);
    }
    if (cfg.filter_enabled)
        filter_ = make_symbol(filter_factors(grid, cfg.filter, cfg.filter_mode));

    if (grid.dims == 1) {
        d1_ = make_symbol(derivative_symbol(grid, 1, 0));
    } else {
        dx_ = make_symbol(derivative_symbol(grid, 1, 0));
        dy_ = make_symbol(derivative_symbol(grid, 1, 1));
        vx_ = make_symbol(velocity_solve_symbol(grid, 0));
        vy_ = make_symbol(velocity_solve_symbol(grid, 1));
    }

    forcing_ = state_tensor(spec_.forcing);
    for (double v : forcing_.data)
        if (v != 0.0) forced_ = true;
}

Tensor TapeStepper::state_tensor(const SpectralState& state) const {
    RealField f = to_real(state);
    const Grid& grid = spec_.grid;
    Tensor t(grid.dims, grid.resolution, grid.dims == 2 ? grid.resolution : 1,
             1);
    t.data = f.channels[0];
    return t;
}

SpectralState TapeStepper::spectral_state(const Tensor& state,
                                          double time) const {
    RealField f(spec_.grid, 1, time);
    f.channels[0] = state.data;
    return to_spectral(f);
}

/// State algebra over tape variables for the shared IMEX template.
class TapeVarOps {
  public:
    using State = Var;

    TapeVarOps(Tape& tape, const TapeStepper& s,
               const TapeCorrection* correction)
        : tape_(tape), s_(s), correction_(correction) {}

    Var tendency(Var u) {
        Var n = raw_tendency(u);
        if (correction_) n = tape_.sub(n, (*correction_)(tape_, u));
        return n;
    }

    Var cn_solve(Var u, Var t, double a) {
        if (a == s_.cfg_.dt / 2)
            return tape_.add(tape_.spectral_scale(u, s_.cn_gain_half_),
                             tape_.spectral_scale(t, s_.cn_tend_half_));
        if (a == s_.cfg_.dt)
            return tape_.add(tape_.spectral_scale(u, s_.cn_gain_full_),
                             tape_.spectral_scale(t, s_.cn_tend_full_));
        throw std::logic_error("cn_solve called with an unprepared sub-step");
    }

    Var euler_solve(Var u, Var t, double h) {
        return tape_.add_scaled(tape_.spectral_scale(u, s_.euler_gain_), t, h);
    }

    Var combine(Var n1, Var n2, Var n3, Var n4) {
        return tape_.scale(tape_.total({n1, n2, n2, n3, n3, n4}), 1.0 / 6.0);
    }

    Var filter(Var v) {
        return s_.filter_ ? tape_.spectral_scale(v, s_.filter_) : v;
    }

  private:
    Var raw_tendency(Var u) {
        const EquationSpec& spec = s_.spec_;
        if (!spec.nonlinear_enabled) {
            Tensor zero = tape_.value(u);
            for (double& v : zero.data) v = 0.0;
            Var base = tape_.leaf(std::move(zero));
            return s_.forced_ ? tape_.add(base, tape_.leaf(s_.forcing_))
                              : base;
        }
        if (spec.grid.dims == 1) {
            Var ux = tape_.spectral_scale(u, s_.d1_);
            if (spec.nonlinear_form == NonlinearForm::advective)
                return tape_.scale(tape_.mul(u, ux), -1.0);
            Var dsq = tape_.spectral_scale(tape_.mul(u, u), s_.d1_);
            if (spec.nonlinear_form == NonlinearForm::conservative)
                return tape_.scale(dsq, -0.5);
            Var adv = tape_.mul(u, ux);
            return tape_.scale(tape_.add(adv, dsq), -1.0 / 3.0);
        }
        Var vx = tape_.spectral_scale(u, s_.vx_);
        Var vy = tape_.spectral_scale(u, s_.vy_);
        Var wx = tape_.spectral_scale(u, s_.dx_);
        Var wy = tape_.spectral_scale(u, s_.dy_);
        Var conv = tape_.scale(
            tape_.add(tape_.mul(vx, wx), tape_.mul(vy, wy)), -1.0);
        return s_.forced_ ? tape_.add(conv, tape_.leaf(s_.forcing_)) : conv;
    }

    Tape& tape_;
    const TapeStepper& s_;
    const TapeCorrection* correction_;
};

Var TapeStepper::tendency(Tape& tape, Var u) const {
    TapeVarOps ops(tape, *this, nullptr);
    return ops.tendency(u);
}

Var TapeStepper::physics_step(Tape& tape, Var u) const {
    TapeVarOps ops(tape, *this, nullptr);
    return cfg_.scheme == Scheme::imex_cn_rk4
               ? imex_cn_rk4_step(ops, u, cfg_.dt)
               : forward_euler_step(ops, u, cfg_.dt);
}

Var TapeStepper::hybrid_step(Tape& tape, Var u,
                             const TapeCorrection& correction) const {
    Var out = physics_step(tape, u);
    return tape.add_scaled(out, correction(tape, u), cfg_.dt);
}

Var TapeStepper::nonlinear_corrected_step(
    Tape& tape, Var u, const TapeCorrection& correction) const {
    if (spec_.grid.dims != 2)
        throw std::invalid_argument(
            "nonlinear-term correction requires a 2D equation");
    TapeVarOps ops(tape, *this, &correction);
    return cfg_.scheme == Scheme::imex_cn_rk4
               ? imex_cn_rk4_step(ops, u, cfg_.dt)
               : forward_euler_step(ops, u, cfg_.dt);
}

}  // namespace specml
