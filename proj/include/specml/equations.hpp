#pragma once

#include <string>
#include <vector>

#include "specml/spectral_ops.hpp"
#include "specml/state.hpp"

namespace specml {

enum class EquationName { ks, unstable_burgers, kolmogorov };

/// Discrete form of the quadratic term. All equal u*u_x continuously but
/// differ discretely: advective u*d_x(u), conservative (1/2)d_x(u^2), and
/// the skew-symmetric split (u*d_x(u) + d_x(u^2))/3 which conserves the
/// collocation energy exactly.
enum class NonlinearForm { advective, conservative, skew_symmetric };

EquationName equation_name_from_string(const std::string& s);
std::string to_string(EquationName name);

struct KsParams {
    double domain_length = 64.0;
};

/// Burgers with destabilizing forcing g(k) = -g_amp * exp(-g_width * k^2)
/// acting through the linear term; k is the physical wavenumber 2*pi*m/L.
struct UnstableBurgersParams {
    double viscosity = 0.01;
    double domain_length = 40.0 * kPi;
    double g_amp = 0.04;
    double g_width = 16.0;
};

struct KolmogorovParams {
    double viscosity = 1.0e-3;
    double drag = 0.1;
    int forcing_wavenumber = 4;
    double domain_length = kTwoPi;
    bool forcing_enabled = true;
};

/// A PDE as du/dt = lambda_k * u_hat + N(u): per-mode linear symbol plus a
/// pseudospectral nonlinear tendency. The symbol is purely real for all
/// three equations.
struct EquationSpec {
    EquationName name = EquationName::ks;
    Grid grid;
    std::vector<double> linear_symbol;
    SpectralState forcing;  // zero field when unforced
    NonlinearForm nonlinear_form = NonlinearForm::advective;
    bool nonlinear_enabled = true;
};

EquationSpec make_ks_equation(int resolution, const KsParams& params = {});
EquationSpec make_unstable_burgers_equation(
    int resolution, const UnstableBurgersParams& params = {});
EquationSpec make_kolmogorov_equation(int resolution,
                                      const KolmogorovParams& params = {});

/// Spectral representation of -k_f * cos(k_f * y) on a 2D grid.
SpectralState kolmogorov_forcing(const Grid& grid, int k_f);

/// Explicit tendency N(u): -u*u_x in 1D, -(v . grad omega) + f_hat in 2D.
/// No filtering here; the integrator filters once per step.
SpectralState nonlinear_tendency(const EquationSpec& spec,
                                 const SpectralState& state);

}  // namespace specml
