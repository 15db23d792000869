#include "specml/correction.hpp"

#include <memory>
#include <stdexcept>

#include "specml/field_tensor.hpp"
#include "specml/spectral_ops.hpp"

namespace specml {

namespace {

void validate(const CorrectionConfig& cfg) {
    if (!(cfg.input_scale > 0) || !(cfg.output_scale > 0))
        throw std::invalid_argument("correction scales must be positive");
}

void check_dims(const CorrectionConfig& cfg, int dims) {
    bool wants_1d = cfg.representation == Representation::identity_1d;
    if (wants_1d && dims != 1)
        throw std::invalid_argument(
            "identity representation requires a 1D state");
    if (!wants_1d && dims != 1 && dims != 2)
        throw std::invalid_argument("unsupported state dimensionality");
    if (!wants_1d && dims == 1)
        throw std::invalid_argument(
            "velocity representations require a 2D state");
}

}  // namespace

Representation representation_from_string(const std::string& s) {
    if (s == "velocity") return Representation::velocity;
    if (s == "vorticity") return Representation::vorticity;
    if (s == "velocity_and_vorticity")
        return Representation::velocity_and_vorticity;
    if (s == "identity_1d") return Representation::identity_1d;
    throw std::invalid_argument("unknown representation: " + s);
}

std::string to_string(Representation r) {
    switch (r) {
        case Representation::velocity: return "velocity";
        case Representation::vorticity: return "vorticity";
        case Representation::velocity_and_vorticity:
            return "velocity_and_vorticity";
        case Representation::identity_1d: return "identity_1d";
    }
    throw std::logic_error("bad representation");
}

int correction_input_channels(const CorrectionConfig& cfg, int dims,
                              int state_channels) {
    check_dims(cfg, dims);
    if (cfg.mode == CorrectionMode::nonlinear_term) return 4;
    switch (cfg.representation) {
        case Representation::identity_1d: return 1;
        case Representation::vorticity: return 1;
        case Representation::velocity: return 2;
        case Representation::velocity_and_vorticity: return 3;
    }
    throw std::logic_error("bad representation");
}

RealField state_transform(const CorrectionConfig& cfg,
                          const SpectralState& state) {
    validate(cfg);
    check_dims(cfg, state.grid.dims);

    auto scaled = [&](RealField f) {
        for (auto& ch : f.channels)
            for (double& v : ch) v *= cfg.input_scale;
        return f;
    };

    if (cfg.mode == CorrectionMode::nonlinear_term) {
        if (state.num_channels() != 1)
            throw std::invalid_argument(
                "nonlinear-term input expects a vorticity state");
        SpectralState vel = velocity_solve(state);
        RealField v = to_real(vel);
        RealField gx = to_real(spectral_derivative(state, 1, 0));
        RealField gy = to_real(spectral_derivative(state, 1, 1));
        RealField out(state.grid, 4, state.time);
        out.channels[0] = v.channels[0];
        out.channels[1] = v.channels[1];
        out.channels[2] = gx.channels[0];
        out.channels[3] = gy.channels[0];
        return scaled(std::move(out));
    }

    switch (cfg.representation) {
        case Representation::identity_1d:
        case Representation::vorticity:
            if (state.num_channels() != 1)
                throw std::invalid_argument(
                    "representation expects a one-channel state");
            return scaled(to_real(state));
        case Representation::velocity:
            if (state.num_channels() == 2) return scaled(to_real(state));
            return scaled(to_real(velocity_solve(state)));
        case Representation::velocity_and_vorticity: {
            if (state.num_channels() != 1)
                throw std::invalid_argument(
                    "representation expects a one-channel state");
            RealField v = to_real(velocity_solve(state));
            RealField w = to_real(state);
            RealField out(state.grid, 3, state.time);
            out.channels[0] = v.channels[0];
            out.channels[1] = v.channels[1];
            out.channels[2] = w.channels[0];
            return scaled(std::move(out));
        }
    }
    throw std::logic_error("bad representation");
}

SpectralState learned_correction(const CorrectionConfig& cfg,
                                 const EpdParams& params,
                                 const SpectralState& state) {
    RealField input = state_transform(cfg, state);
    if (input.num_channels() != cfg.epd.input_channels)
        throw std::invalid_argument(
            "state transform channels do not match the network input");
    if (cfg.epd.output_channels != state.num_channels())
        throw std::invalid_argument(
            "network output channels do not match the state");

    Tensor out = epd_apply(cfg.epd, params, tensor_from_field(input));
    for (double& v : out.data) v *= cfg.output_scale;
    return to_spectral(field_from_tensor(state.grid, out, state.time));
}

SpectralState pure_ml_step(const CorrectionConfig& cfg,
                           const EpdParams& params, const SpectralState& state,
                           double h) {
    SpectralState corr = learned_correction(cfg, params, state);
    SpectralState out = state;
    for (int c = 0; c < out.num_channels(); ++c)
        for (size_t i = 0; i < out.channels[c].size(); ++i)
            out.channels[c][i] += h * corr.channels[c][i];
    out.time = state.time + h;
    return out;
}

CorrectionFn make_correction_fn(const CorrectionConfig& cfg,
                                const EpdParams& params) {
    auto p = std::make_shared<const EpdParams>(params);
    CorrectionFn fn;
    fn.mode = cfg.mode;
    fn.fn = [cfg, p](const SpectralState& state) {
        return learned_correction(cfg, *p, state);
    };
    return fn;
}

TapeCorrection make_tape_correction(const CorrectionConfig& cfg,
                                    const Grid& grid, const EpdVars& vars) {
    validate(cfg);
    check_dims(cfg, grid.dims);

    Symbol vx, vy, dx, dy;
    if (grid.dims == 2) {
        vx = make_symbol(velocity_solve_symbol(grid, 0));
        vy = make_symbol(velocity_solve_symbol(grid, 1));
        dx = make_symbol(derivative_symbol(grid, 1, 0));
        dy = make_symbol(derivative_symbol(grid, 1, 1));
    }

    return [cfg, vars, vx, vy, dx, dy](Tape& t, Var u) -> Var {
        Var input{};
        if (cfg.mode == CorrectionMode::nonlinear_term) {
            input = t.concat_channels(
                {t.spectral_scale(u, vx), t.spectral_scale(u, vy),
                 t.spectral_scale(u, dx), t.spectral_scale(u, dy)});
        } else {
            switch (cfg.representation) {
                case Representation::identity_1d:
                case Representation::vorticity:
                    input = u;
                    break;
                case Representation::velocity:
                    input = t.value(u).channels == 2
                                ? u
                                : t.concat_channels({t.spectral_scale(u, vx),
                                                     t.spectral_scale(u, vy)});
                    break;
                case Representation::velocity_and_vorticity:
                    input = t.concat_channels({t.spectral_scale(u, vx),
                                               t.spectral_scale(u, vy), u});
                    break;
            }
        }
        if (cfg.input_scale != 1.0) input = t.scale(input, cfg.input_scale);
        Var out = epd_forward(t, cfg.epd, vars, input);
        return t.scale(out, cfg.output_scale);
    };
}

}  // namespace specml
