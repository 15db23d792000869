#pragma once

#include <random>

#include "specml/spectral_ops.hpp"
#include "specml/state.hpp"

namespace specml::testing {

/// Random real field with independent N(0,1) samples, deterministic per seed.
inline RealField random_real_field(const Grid& grid, int num_channels,
                                   unsigned seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    RealField f(grid, num_channels);
    for (auto& ch : f.channels)
        for (double& v : ch) v = dist(gen);
    return f;
}

/// Random conjugate-symmetric spectral state (transform of real noise).
inline SpectralState random_spectral_state(const Grid& grid, int num_channels,
                                           unsigned seed) {
    return to_spectral(random_real_field(grid, num_channels, seed));
}

/// As above with all Nyquist-slot coefficients removed.
inline SpectralState random_nyquist_free_state(const Grid& grid,
                                               int num_channels,
                                               unsigned seed) {
    SpectralState s = random_spectral_state(grid, num_channels, seed);
    int n = grid.resolution;
    for (auto& ch : s.channels) {
        if (grid.dims == 1) {
            ch[n / 2] = 0.0;
        } else {
            for (int i = 0; i < n; ++i) {
                ch[(n / 2) * n + i] = 0.0;
                ch[i * n + n / 2] = 0.0;
            }
        }
    }
    return s;
}

inline double max_channel_diff(const SpectralState& a, const SpectralState& b) {
    double m = 0.0;
    for (int c = 0; c < a.num_channels(); ++c)
        for (size_t i = 0; i < a.channels[c].size(); ++i)
            m = std::max(m, std::abs(a.channels[c][i] - b.channels[c][i]));
    return m;
}

inline double max_real_diff(const RealField& a, const RealField& b) {
    double m = 0.0;
    for (int c = 0; c < a.num_channels(); ++c)
        for (size_t i = 0; i < a.channels[c].size(); ++i)
            m = std::max(m, std::abs(a.channels[c][i] - b.channels[c][i]));
    return m;
}

}  // namespace specml::testing
