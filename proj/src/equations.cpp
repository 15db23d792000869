#include "specml/equations.hpp"

#include <cmath>
#include <stdexcept>

#include "specml/fft.hpp"

namespace specml {

EquationName equation_name_from_string(const std::string& s) {
    if (s == "ks") return EquationName::ks;
    if (s == "unstable_burgers") return EquationName::unstable_burgers;
    if (s == "kolmogorov") return EquationName::kolmogorov;
    throw std::invalid_argument("unknown equation name: " + s);
}

std::string to_string(EquationName name) {
    switch (name) {
        case EquationName::ks: return "ks";
        case EquationName::unstable_burgers: return "unstable_burgers";
        case EquationName::kolmogorov: return "kolmogorov";
    }
    throw std::logic_error("unreachable");
}

EquationSpec make_ks_equation(int resolution, const KsParams& params) {
    EquationSpec spec;
    spec.name = EquationName::ks;
    spec.grid = Grid(1, resolution, params.domain_length);
    spec.linear_symbol.resize(resolution);
    for (int i = 0; i < resolution; ++i) {
        double k = spec.grid.wavenumber(i);
        double k2 = k * k;
        spec.linear_symbol[i] = k2 - k2 * k2;
    }
    spec.forcing = SpectralState(spec.grid);
    return spec;
}

EquationSpec make_unstable_burgers_equation(
    int resolution, const UnstableBurgersParams& params) {
    if (!(params.viscosity > 0))
        throw std::invalid_argument("viscosity must be positive");
    EquationSpec spec;
    spec.name = EquationName::unstable_burgers;
    spec.grid = Grid(1, resolution, params.domain_length);
    spec.linear_symbol.resize(resolution);
    for (int i = 0; i < resolution; ++i) {
        double k = spec.grid.wavenumber(i);
        double g = -params.g_amp * std::exp(-params.g_width * k * k);
        spec.linear_symbol[i] = -(g + params.viscosity) * k * k;
    }
    spec.forcing = SpectralState(spec.grid);
    return spec;
}

EquationSpec make_kolmogorov_equation(int resolution,
                                      const KolmogorovParams& params) {
    if (!(params.viscosity > 0) || params.drag < 0)
        throw std::invalid_argument("kolmogorov requires nu > 0, drag >= 0");
    EquationSpec spec;
    spec.name = EquationName::kolmogorov;
    spec.grid = Grid(2, resolution, params.domain_length);
    spec.linear_symbol.resize(spec.grid.num_points());
    for (int ix = 0; ix < resolution; ++ix) {
        double kx = spec.grid.wavenumber(ix);
        for (int iy = 0; iy < resolution; ++iy) {
            double ky = spec.grid.wavenumber(iy);
            spec.linear_symbol[ix * resolution + iy] =
                -params.viscosity * (kx * kx + ky * ky) - params.drag;
        }
    }
    spec.forcing = params.forcing_enabled
                       ? kolmogorov_forcing(spec.grid, params.forcing_wavenumber)
                       : SpectralState(spec.grid);
    return spec;
}

SpectralState kolmogorov_forcing(const Grid& grid, int k_f) {
    if (grid.dims != 2)
        throw std::invalid_argument("kolmogorov forcing requires a 2D grid");
    if (k_f < 1 || k_f >= grid.resolution / 2)
        throw std::invalid_argument("unresolved forcing");
    // -k_f cos(k_f y) has coefficients -k_f/2 at modes (0, +-k_f).
    SpectralState f(grid);
    int n = grid.resolution;
    f.channels[0][k_f] = Complex(-0.5 * k_f, 0.0);
    f.channels[0][n - k_f] = Complex(-0.5 * k_f, 0.0);
    return f;
}

namespace {

RealChannel to_real_samples(const Grid& grid, const SpectralChannel& ch) {
    std::vector<Complex> buf(ch);
    fft_inverse(grid, buf.data(), buf.data());
    RealChannel out(grid.num_points());
    for (int i = 0; i < grid.num_points(); ++i) out[i] = buf[i].real();
    return out;
}

SpectralChannel to_spectral_samples(const Grid& grid, const RealChannel& r) {
    std::vector<Complex> buf(grid.num_points());
    for (int i = 0; i < grid.num_points(); ++i) buf[i] = Complex(r[i], 0.0);
    fft_forward(grid, buf.data(), buf.data());
    return buf;
}

SpectralChannel apply_symbol(const Grid& grid, const SpectralChannel& ch,
                             const std::vector<Complex>& sym) {
    SpectralChannel out(ch);
    for (int i = 0; i < grid.num_points(); ++i) out[i] *= sym[i];
    return out;
}

SpectralState burgers_form_tendency(const EquationSpec& spec,
                                    const SpectralState& state) {
    const Grid& grid = spec.grid;
    const auto d1 = derivative_symbol(grid, 1, 0);
    const auto u = to_real_samples(grid, state.channels[0]);
    const auto ux = to_real_samples(grid, apply_symbol(grid, state.channels[0], d1));

    SpectralState out(grid, 1, state.time);
    if (spec.nonlinear_form == NonlinearForm::advective) {
        RealChannel prod(grid.num_points());
        for (int i = 0; i < grid.num_points(); ++i) prod[i] = -u[i] * ux[i];
        out.channels[0] = to_spectral_samples(grid, prod);
    } else if (spec.nonlinear_form == NonlinearForm::conservative) {
        RealChannel sq(grid.num_points());
        for (int i = 0; i < grid.num_points(); ++i) sq[i] = u[i] * u[i];
        auto dsq = apply_symbol(grid, to_spectral_samples(grid, sq), d1);
        for (int i = 0; i < grid.num_points(); ++i)
            out.channels[0][i] = -0.5 * dsq[i];
    } else {
        // Skew-symmetric split -(u*u_x + d_x(u^2))/3. With the collocation
        // inner product <u, u*u_x> = -<u, d_x(u^2)> exactly, so this split
        // conserves discrete energy; the (1/2, 1/4) average does not.
        RealChannel adv(grid.num_points()), sq(grid.num_points());
        for (int i = 0; i < grid.num_points(); ++i) {
            adv[i] = u[i] * ux[i];
            sq[i] = u[i] * u[i];
        }
        auto dsq = apply_symbol(grid, to_spectral_samples(grid, sq), d1);
        auto adv_hat = to_spectral_samples(grid, adv);
        for (int i = 0; i < grid.num_points(); ++i)
            out.channels[0][i] = (adv_hat[i] + dsq[i]) * (-1.0 / 3.0);
    }
    return out;
}

SpectralState kolmogorov_tendency(const EquationSpec& spec,
                                  const SpectralState& state) {
    const Grid& grid = spec.grid;
    SpectralState v = velocity_solve(state);
    const auto vx = to_real_samples(grid, v.channels[0]);
    const auto vy = to_real_samples(grid, v.channels[1]);
    const auto wx = to_real_samples(
        grid, apply_symbol(grid, state.channels[0], derivative_symbol(grid, 1, 0)));
    const auto wy = to_real_samples(
        grid, apply_symbol(grid, state.channels[0], derivative_symbol(grid, 1, 1)));

    RealChannel conv(grid.num_points());
    for (int i = 0; i < grid.num_points(); ++i)
        conv[i] = -(vx[i] * wx[i] + vy[i] * wy[i]);

    SpectralState out(grid, 1, state.time);
    out.channels[0] = to_spectral_samples(grid, conv);
    for (int i = 0; i < grid.num_points(); ++i)
        out.channels[0][i] += spec.forcing.channels[0][i];
    return out;
}

}  // namespace

SpectralState nonlinear_tendency(const EquationSpec& spec,
                                 const SpectralState& state) {
    if (state.grid != spec.grid)
        throw std::invalid_argument("state grid does not match equation grid");
    if (state.num_channels() != 1)
        throw std::invalid_argument("nonlinear tendency expects one channel");

    if (!spec.nonlinear_enabled) {
        SpectralState out(spec.grid, 1, state.time);
        for (int i = 0; i < spec.grid.num_points(); ++i)
            out.channels[0][i] = spec.forcing.channels[0][i];
        return out;
    }
    return spec.name == EquationName::kolmogorov
               ? kolmogorov_tendency(spec, state)
               : burgers_form_tendency(spec, state);
}

}  // namespace specml
