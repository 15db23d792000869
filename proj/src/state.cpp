#include "specml/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "specml/fft.hpp"

namespace specml {

std::vector<double> grid_coordinates(const Grid& grid) {
    std::vector<double> x(grid.resolution);
    for (int i = 0; i < grid.resolution; ++i) x[i] = i * grid.spacing();
    return x;
}

double conjugate_symmetry_error(const SpectralState& state) {
    const int n = state.grid.resolution;
    double worst = 0.0, scale = 0.0;
    for (const auto& ch : state.channels) {
        for (int i = 0; i < state.grid.num_points(); ++i)
            scale = std::max(scale, std::abs(ch[i]));
        if (state.grid.dims == 1) {
            for (int i = 0; i < n; ++i) {
                int j = (n - i) % n;
                worst = std::max(worst, std::abs(ch[i] - std::conj(ch[j])));
            }
        } else {
            for (int ix = 0; ix < n; ++ix) {
                int jx = (n - ix) % n;
                for (int iy = 0; iy < n; ++iy) {
                    int jy = (n - iy) % n;
                    worst = std::max(
                        worst, std::abs(ch[ix * n + iy] - std::conj(ch[jx * n + jy])));
                }
            }
        }
    }
    return scale > 0 ? worst / scale : 0.0;
}

RealField to_real(const SpectralState& state) {
    RealField out(state.grid, state.num_channels(), state.time);
    std::vector<Complex> buf(state.grid.num_points());
    for (int c = 0; c < state.num_channels(); ++c) {
        fft_inverse(state.grid, state.channels[c].data(), buf.data());
        double max_imag = 0.0, max_mag = 0.0;
        for (int i = 0; i < state.grid.num_points(); ++i) {
            max_imag = std::max(max_imag, std::abs(buf[i].imag()));
            max_mag = std::max(max_mag, std::abs(buf[i]));
            out.channels[c][i] = buf[i].real();
        }
        if (max_mag > 0 && max_imag > 1e-8 * max_mag)
            throw std::invalid_argument("non-real field");
    }
    return out;
}

SpectralState to_spectral(const RealField& field) {
    SpectralState out(field.grid, field.num_channels(), field.time);
    std::vector<Complex> buf(field.grid.num_points());
    for (int c = 0; c < field.num_channels(); ++c) {
        for (int i = 0; i < field.grid.num_points(); ++i)
            buf[i] = Complex(field.channels[c][i], 0.0);
        fft_forward(field.grid, buf.data(), out.channels[c].data());
    }
    return out;
}

double max_abs(const RealField& field) {
    double m = 0.0;
    for (const auto& ch : field.channels)
        for (double v : ch) m = std::max(m, std::abs(v));
    return m;
}

bool all_finite(const SpectralState& state) {
    for (const auto& ch : state.channels)
        for (const Complex& z : ch)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

}  // namespace specml
