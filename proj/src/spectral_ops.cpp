#include "specml/spectral_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace specml {

std::vector<double> axis_wavenumbers(const Grid& grid, bool zero_nyquist) {
    std::vector<double> k(grid.resolution);
    for (int i = 0; i < grid.resolution; ++i) k[i] = grid.wavenumber(i);
    if (zero_nyquist) k[grid.resolution / 2] = 0.0;
    return k;
}

std::vector<Complex> derivative_symbol(const Grid& grid, int order, int axis) {
    if (order < 1) throw std::invalid_argument("derivative order must be >= 1");
    if (axis < 0 || axis >= grid.dims)
        throw std::invalid_argument("derivative axis out of range");
    const int n = grid.resolution;
    const auto k = axis_wavenumbers(grid, order % 2 == 1);
    // (i k)^order = k^order * i^order, with i^order cycling {1, i, -1, -i}.
    static const Complex unit[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    std::vector<Complex> axis_sym(n);
    for (int i = 0; i < n; ++i)
        axis_sym[i] = unit[order % 4] * std::pow(k[i], order);

    std::vector<Complex> sym(grid.num_points());
    if (grid.dims == 1) {
        sym = axis_sym;
    } else {
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy)
                sym[ix * n + iy] = axis_sym[axis == 0 ? ix : iy];
    }
    return sym;
}

namespace {

SpectralState apply_symbol(const SpectralState& state,
                           const std::vector<Complex>& sym) {
    SpectralState out = state;
    for (auto& ch : out.channels)
        for (int i = 0; i < state.grid.num_points(); ++i) ch[i] *= sym[i];
    return out;
}

SpectralState apply_factors(const SpectralState& state,
                            const std::vector<double>& f) {
    SpectralState out = state;
    for (auto& ch : out.channels)
        for (int i = 0; i < state.grid.num_points(); ++i) ch[i] *= f[i];
    return out;
}

}  // namespace

SpectralState spectral_derivative(const SpectralState& state, int order,
                                  int axis) {
    return apply_symbol(state, derivative_symbol(state.grid, order, axis));
}

std::vector<double> filter_factors(const Grid& grid, const FilterSpec& spec,
                                   FilterMode mode) {
    // alpha == 0 is a valid no-op: every factor is exactly exp(0) = 1.
    if (!(spec.alpha >= 0) || spec.p < 1)
        throw std::invalid_argument("filter requires alpha >= 0 and p >= 1");
    const int n = grid.resolution;
    const double k_max = grid.max_wavenumber();
    const auto k = axis_wavenumbers(grid, false);

    auto axis_factor = [&](int i) {
        return std::exp(-spec.alpha *
                        std::pow(std::abs(k[i]) / k_max, 2.0 * spec.p));
    };

    std::vector<double> f(grid.num_points());
    if (grid.dims == 1) {
        for (int i = 0; i < n; ++i) f[i] = axis_factor(i);
        return f;
    }
    if (mode == FilterMode::separable) {
        std::vector<double> fx(n);
        for (int i = 0; i < n; ++i) fx[i] = axis_factor(i);
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy) f[ix * n + iy] = fx[ix] * fx[iy];
    } else {
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy) {
                double mag = std::hypot(k[ix], k[iy]);
                f[ix * n + iy] =
                    std::exp(-spec.alpha * std::pow(mag / k_max, 2.0 * spec.p));
            }
    }
    return f;
}

SpectralState exponential_filter(const SpectralState& state,
                                 const FilterSpec& spec, FilterMode mode) {
    return apply_factors(state, filter_factors(state.grid, spec, mode));
}

namespace {

// A target-axis slot maps to one source slot, or to the +-M/2 pair when the
// target Nyquist content is folded.
struct AxisMap {
    int first;
    int second;  // -1 if absent
};

std::vector<AxisMap> axis_maps(int src_n, int tgt_n) {
    std::vector<AxisMap> maps(tgt_n);
    for (int j = 0; j < tgt_n; ++j) {
        int m = j < tgt_n / 2 ? j : j - tgt_n;
        int idx = m >= 0 ? m : m + src_n;
        maps[j] = {idx, -1};
        if (m == -tgt_n / 2 && src_n > tgt_n) maps[j].second = tgt_n / 2;
    }
    return maps;
}

}  // namespace

SpectralState truncate_downsample(const SpectralState& state,
                                  const Grid& target) {
    const Grid& src = state.grid;
    if (target.dims != src.dims || target.domain_length != src.domain_length)
        throw std::invalid_argument("downsample target must share domain");
    if (target.resolution > src.resolution)
        throw std::invalid_argument("downsample target exceeds source resolution");
    if (src.resolution % target.resolution != 0)
        throw std::invalid_argument("target resolution must divide source");

    SpectralState out(target, state.num_channels(), state.time);
    const auto maps = axis_maps(src.resolution, target.resolution);
    const int sn = src.resolution, tn = target.resolution;
    for (int c = 0; c < state.num_channels(); ++c) {
        const auto& in = state.channels[c];
        auto& dst = out.channels[c];
        if (src.dims == 1) {
            for (int j = 0; j < tn; ++j) {
                dst[j] = in[maps[j].first];
                if (maps[j].second >= 0) dst[j] += in[maps[j].second];
            }
        } else {
            for (int jx = 0; jx < tn; ++jx)
                for (int jy = 0; jy < tn; ++jy) {
                    Complex v(0.0, 0.0);
                    for (int sx : {maps[jx].first, maps[jx].second}) {
                        if (sx < 0) continue;
                        for (int sy : {maps[jy].first, maps[jy].second}) {
                            if (sy < 0) continue;
                            v += in[sx * sn + sy];
                        }
                    }
                    dst[jx * tn + jy] = v;
                }
        }
    }
    return out;
}

std::vector<Complex> velocity_solve_symbol(const Grid& grid, int component) {
    if (grid.dims != 2)
        throw std::invalid_argument("velocity-solve requires 2D");
    const int n = grid.resolution;
    const auto k_full = axis_wavenumbers(grid, false);
    const auto k_odd = axis_wavenumbers(grid, true);
    std::vector<Complex> sym(grid.num_points());
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy) {
            double k2 = k_full[ix] * k_full[ix] + k_full[iy] * k_full[iy];
            Complex s(0.0, 0.0);
            if (k2 > 0) {
                // psi_hat = w_hat/|k|^2; v = (d_y psi, -d_x psi)
                s = component == 0 ? Complex(0.0, k_odd[iy] / k2)
                                   : Complex(0.0, -k_odd[ix] / k2);
            }
            sym[ix * n + iy] = s;
        }
    return sym;
}

SpectralState velocity_solve(const SpectralState& vorticity) {
    if (vorticity.grid.dims != 2)
        throw std::invalid_argument("velocity-solve requires 2D");
    if (vorticity.num_channels() != 1)
        throw std::invalid_argument("velocity-solve expects a single channel");

    SpectralState out(vorticity.grid, 2, vorticity.time);
    for (int comp = 0; comp < 2; ++comp) {
        const auto sym = velocity_solve_symbol(vorticity.grid, comp);
        for (int i = 0; i < vorticity.grid.num_points(); ++i)
            out.channels[comp][i] = sym[i] * vorticity.channels[0][i];
    }
    return out;
}

double spectral_energy(const SpectralState& state) {
    double e = 0.0;
    for (const auto& ch : state.channels)
        for (const Complex& z : ch) e += std::norm(z);
    return e;
}

}  // namespace specml
