#include <doctest.h>

#include <cmath>
#include <complex>

#include "helpers.hpp"
#include "specml/fft.hpp"
#include "specml/grid.hpp"
#include "specml/spectral_ops.hpp"
#include "specml/state.hpp"

using namespace specml;
using namespace specml::testing;

TEST_CASE("grid validates construction and indexes modes") {
    CHECK_THROWS_AS(Grid(3, 16, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid(1, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid(1, 15, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid(1, 16, 0.0), std::invalid_argument);

    Grid g(1, 8, kTwoPi);
    CHECK(g.num_points() == 8);
    CHECK(g.spacing() == doctest::Approx(kTwoPi / 8));
    CHECK(g.mode_index(0) == 0);
    CHECK(g.mode_index(3) == 3);
    CHECK(g.mode_index(4) == -4);
    CHECK(g.mode_index(7) == -1);
    CHECK(g.wavenumber(1) == doctest::Approx(1.0));
    CHECK(g.max_wavenumber() == doctest::Approx(4.0));

    Grid g2(2, 16, 2.0);
    CHECK(g2.num_points() == 256);
    CHECK(g2.fundamental_wavenumber() == doctest::Approx(kPi));
}

TEST_CASE("dc-only state transforms to a constant field") {
    Grid g(1, 16, kTwoPi);
    SpectralState s(g);
    s.channels[0][0] = 3.25;
    RealField f = to_real(s);
    for (double v : f.channels[0]) CHECK(v == doctest::Approx(3.25).epsilon(1e-14));
}

TEST_CASE("sin(x) occupies exactly modes +-1") {
    Grid g(1, 16, kTwoPi);
    auto x = grid_coordinates(g);
    RealField f(g);
    for (int i = 0; i < 16; ++i) f.channels[0][i] = std::sin(x[i]);
    SpectralState s = to_spectral(f);
    // sin(x) = (e^{ix} - e^{-ix}) / 2i: u_hat(+1) = -i/2, u_hat(-1) = +i/2.
    CHECK(std::abs(s.channels[0][1] - Complex(0.0, -0.5)) < 1e-14);
    CHECK(std::abs(s.channels[0][15] - Complex(0.0, 0.5)) < 1e-14);
    for (int i = 0; i < 16; ++i) {
        if (i == 1 || i == 15) continue;
        CHECK(std::abs(s.channels[0][i]) < 1e-14);
    }
}

TEST_CASE("transform round trip is the identity") {
    for (Grid g : {Grid(1, 64, 64.0), Grid(2, 16, kTwoPi)}) {
        SpectralState s = random_spectral_state(g, 2, 7u);
        SpectralState back = to_spectral(to_real(s));
        CHECK(max_channel_diff(s, back) < 1e-12);
        CHECK(s.time == back.time);
    }
}

TEST_CASE("to_real rejects non-conjugate-symmetric input") {
    Grid g(1, 16, kTwoPi);
    SpectralState s(g);
    s.channels[0][1] = Complex(1.0, 0.0);  // no matching conjugate at -1
    CHECK(conjugate_symmetry_error(s) > 0.1);
    CHECK_THROWS_WITH_AS(to_real(s), "non-real field", std::invalid_argument);

    SpectralState ok = random_spectral_state(g, 1, 3u);
    CHECK(conjugate_symmetry_error(ok) < 1e-13);
}

TEST_CASE("parseval holds under the 1/N normalization") {
    for (Grid g : {Grid(1, 128, 40 * kPi), Grid(2, 32, kTwoPi)}) {
        RealField f = random_real_field(g, 1, 11u);
        double sum_sq = 0.0;
        for (double v : f.channels[0]) sum_sq += v * v;
        double spectral = spectral_energy(to_spectral(f));
        CHECK(sum_sq / g.num_points() == doctest::Approx(spectral).epsilon(1e-10));
    }
}

TEST_CASE("spectral derivative matches analytic derivatives") {
    Grid g(1, 32, kTwoPi);
    auto x = grid_coordinates(g);
    SpectralState s(g);  // exact spectrum of sin(x)
    s.channels[0][1] = Complex(0.0, -0.5);
    s.channels[0][31] = Complex(0.0, 0.5);

    RealField d1 = to_real(spectral_derivative(s, 1));
    RealField d4 = to_real(spectral_derivative(s, 4));
    for (int i = 0; i < 32; ++i) {
        CHECK(d1.channels[0][i] == doctest::Approx(std::cos(x[i])).epsilon(1e-12));
        CHECK(d4.channels[0][i] == doctest::Approx(std::sin(x[i])).epsilon(1e-12));
    }

    SpectralState c(g);
    c.channels[0][0] = 5.0;
    for (int order : {1, 2, 3}) {
        RealField dc = to_real(spectral_derivative(c, order));
        CHECK(max_abs(dc) < 1e-14);
    }

    CHECK_THROWS_AS(spectral_derivative(s, 0), std::invalid_argument);
}

TEST_CASE("spectral derivative is linear") {
    Grid g(1, 64, 64.0);
    SpectralState u = random_spectral_state(g, 1, 1u);
    SpectralState w = random_spectral_state(g, 1, 2u);
    double a = 1.7, b = -0.3;

    SpectralState combo(g);
    for (int i = 0; i < 64; ++i)
        combo.channels[0][i] = a * u.channels[0][i] + b * w.channels[0][i];
    SpectralState lhs = spectral_derivative(combo, 2);

    SpectralState du = spectral_derivative(u, 2);
    SpectralState dw = spectral_derivative(w, 2);
    SpectralState rhs(g);
    for (int i = 0; i < 64; ++i)
        rhs.channels[0][i] = a * du.channels[0][i] + b * dw.channels[0][i];

    CHECK(max_channel_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("nyquist mode: zeroed for odd orders, kept for even") {
    Grid g(1, 16, kTwoPi);
    auto sym1 = derivative_symbol(g, 1, 0);
    auto sym2 = derivative_symbol(g, 2, 0);
    CHECK(std::abs(sym1[8]) == 0.0);
    CHECK(sym2[8].real() == doctest::Approx(-64.0));  // (i*8)^2

    // Odd derivatives of fields with Nyquist content stay real-valued.
    auto x = grid_coordinates(g);
    RealField f(g);
    for (int i = 0; i < 16; ++i) f.channels[0][i] = std::cos(8.0 * x[i]);
    SpectralState d = spectral_derivative(to_spectral(f), 1);
    CHECK_NOTHROW(to_real(d));
    CHECK(max_abs(to_real(d)) < 1e-12);
}

TEST_CASE("2d derivatives act on the chosen axis") {
    Grid g(2, 16, kTwoPi);
    auto x = grid_coordinates(g);
    RealField f(g);
    for (int ix = 0; ix < 16; ++ix)
        for (int iy = 0; iy < 16; ++iy)
            f.channels[0][ix * 16 + iy] = std::sin(x[ix]) * std::cos(x[iy]);
    SpectralState s = to_spectral(f);

    RealField dx = to_real(spectral_derivative(s, 1, 0));
    RealField dy = to_real(spectral_derivative(s, 1, 1));
    for (int ix = 0; ix < 16; ++ix)
        for (int iy = 0; iy < 16; ++iy) {
            double ex = std::cos(x[ix]) * std::cos(x[iy]);
            double ey = -std::sin(x[ix]) * std::sin(x[iy]);
            CHECK(dx.channels[0][ix * 16 + iy] == doctest::Approx(ex).epsilon(1e-12));
            CHECK(dy.channels[0][ix * 16 + iy] == doctest::Approx(ey).epsilon(1e-12));
        }
}

TEST_CASE("exponential filter matches the closed form") {
    Grid g(1, 64, kTwoPi);
    FilterSpec spec;  // alpha=6, p=16
    auto f = filter_factors(g, spec);

    CHECK(f[0] == 1.0);
    CHECK(f[32] == doctest::Approx(2.478752176666359e-3).epsilon(1e-12));  // exp(-6)
    // |k| = k_max/2: exp(-6 * 2^-32) = 1 - 1.397e-9.
    CHECK(f[16] == doctest::Approx(std::exp(-6.0 * std::pow(2.0, -32.0))).epsilon(1e-15));
    CHECK(1.0 - f[16] == doctest::Approx(1.397e-9).epsilon(1e-3));

    // Monotone non-increasing in |k| (slots 33..63 hold modes -31..-1).
    for (int m = 0; m < 32; ++m) CHECK(f[m + 1] <= f[m]);
    for (int m = 33; m < 63; ++m) CHECK(f[m] <= f[m + 1]);
    CHECK(f[33] >= f[32]);

    CHECK_THROWS_AS(filter_factors(g, FilterSpec{-1.0, 16}),
                    std::invalid_argument);
}

TEST_CASE("2d filter: separable product vs radial magnitude") {
    Grid g(2, 16, kTwoPi);
    FilterSpec spec;
    auto sep = filter_factors(g, spec, FilterMode::separable);
    auto rad = filter_factors(g, spec, FilterMode::radial);

    int nyq = 8;
    // Corner (k_max, k_max): separable = exp(-6)^2, radial = exp(-6*2^16).
    CHECK(sep[nyq * 16 + nyq] == doctest::Approx(std::exp(-12.0)).epsilon(1e-12));
    CHECK(rad[nyq * 16 + nyq] < 1e-300);
    // Edge (k_max, 0): both give exp(-6).
    CHECK(sep[nyq * 16] == doctest::Approx(std::exp(-6.0)).epsilon(1e-12));
    CHECK(rad[nyq * 16] == doctest::Approx(std::exp(-6.0)).epsilon(1e-12));
    CHECK(sep[0] == 1.0);
    CHECK(rad[0] == 1.0);
}

TEST_CASE("filter application preserves realness") {
    Grid g(2, 32, kTwoPi);
    SpectralState s = random_spectral_state(g, 1, 21u);
    SpectralState filtered = exponential_filter(s, FilterSpec{});
    CHECK(conjugate_symmetry_error(filtered) < 1e-12);
    CHECK_NOTHROW(to_real(filtered));
}

TEST_CASE("downsampling preserves band-limited signals") {
    Grid src(1, 1024, kTwoPi);
    Grid tgt(1, 32, kTwoPi);
    auto x = grid_coordinates(src);
    RealField f(src);
    for (int i = 0; i < 1024; ++i) f.channels[0][i] = std::sin(x[i]);
    SpectralState down = truncate_downsample(to_spectral(f), tgt);

    auto xt = grid_coordinates(tgt);
    RealField fd = to_real(down);
    for (int i = 0; i < 32; ++i)
        CHECK(fd.channels[0][i] == doctest::Approx(std::sin(xt[i])).epsilon(1e-12));
}

TEST_CASE("downsampling drops modes above the target band") {
    Grid src(1, 1024, kTwoPi);
    Grid tgt(1, 32, kTwoPi);
    SpectralState s(src);
    s.channels[0][20] = Complex(0.5, 0.0);
    s.channels[0][1024 - 20] = Complex(0.5, 0.0);
    SpectralState down = truncate_downsample(s, tgt);
    for (const Complex& z : down.channels[0]) CHECK(std::abs(z) == 0.0);
}

TEST_CASE("downsampling to the same resolution is the identity") {
    Grid g(1, 64, 64.0);
    SpectralState s = random_spectral_state(g, 1, 17u);
    SpectralState same = truncate_downsample(s, g);
    for (int i = 0; i < 64; ++i)
        CHECK(same.channels[0][i] == s.channels[0][i]);
}

TEST_CASE("downsampling composes exactly") {
    struct Chain { Grid src, mid, tgt; };
    for (const Chain& c : {
             Chain{Grid(1, 1024, 64.0), Grid(1, 64, 64.0), Grid(1, 32, 64.0)},
             Chain{Grid(2, 64, kTwoPi), Grid(2, 16, kTwoPi), Grid(2, 8, kTwoPi)}}) {
        const Grid &src = c.src, &mid = c.mid, &tgt = c.tgt;
        SpectralState s = random_spectral_state(src, 1, 5u);
        SpectralState two_step = truncate_downsample(truncate_downsample(s, mid), tgt);
        SpectralState one_step = truncate_downsample(s, tgt);
        for (int i = 0; i < tgt.num_points(); ++i)
            CHECK(two_step.channels[0][i] == one_step.channels[0][i]);
    }
}

TEST_CASE("downsampling folds the target nyquist pair") {
    Grid src(1, 64, kTwoPi);
    Grid tgt(1, 32, kTwoPi);
    auto x = grid_coordinates(src);
    RealField f(src);
    for (int i = 0; i < 64; ++i) f.channels[0][i] = std::cos(16.0 * x[i]);
    SpectralState down = truncate_downsample(to_spectral(f), tgt);

    // cos(16x) is the target's Nyquist mode; samples at target points are (-1)^j.
    CHECK(down.channels[0][16].real() == doctest::Approx(1.0).epsilon(1e-13));
    RealField fd = to_real(down);
    for (int j = 0; j < 32; ++j)
        CHECK(fd.channels[0][j] == doctest::Approx(j % 2 == 0 ? 1.0 : -1.0).epsilon(1e-12));
}

TEST_CASE("downsampling rejects incompatible targets") {
    Grid src(1, 64, kTwoPi);
    SpectralState s(src);
    CHECK_THROWS_AS(truncate_downsample(s, Grid(1, 128, kTwoPi)),
                    std::invalid_argument);
    CHECK_THROWS_AS(truncate_downsample(s, Grid(1, 24, kTwoPi)),
                    std::invalid_argument);
    CHECK_THROWS_AS(truncate_downsample(s, Grid(1, 32, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("velocity solve recovers the analytic stream function") {
    Grid g(2, 64, kTwoPi);
    auto x = grid_coordinates(g);
    RealField w(g);
    for (int ix = 0; ix < 64; ++ix)
        for (int iy = 0; iy < 64; ++iy)
            w.channels[0][ix * 64 + iy] = 2.0 * std::sin(x[ix]) * std::sin(x[iy]);

    RealField v = to_real(velocity_solve(to_spectral(w)));
    for (int ix = 0; ix < 64; ++ix)
        for (int iy = 0; iy < 64; ++iy) {
            double vx = std::sin(x[ix]) * std::cos(x[iy]);
            double vy = -std::cos(x[ix]) * std::sin(x[iy]);
            CHECK(v.channels[0][ix * 64 + iy] == doctest::Approx(vx).epsilon(1e-12));
            CHECK(v.channels[1][ix * 64 + iy] == doctest::Approx(vy).epsilon(1e-12));
        }
}

TEST_CASE("velocity solve of zero vorticity is zero") {
    Grid g(2, 16, kTwoPi);
    SpectralState v = velocity_solve(SpectralState(g));
    CHECK(v.num_channels() == 2);
    for (const auto& ch : v.channels)
        for (const Complex& z : ch) CHECK(std::abs(z) == 0.0);
}

TEST_CASE("velocity solve output is divergence-free and inverts the curl") {
    Grid g(2, 32, kTwoPi);
    SpectralState w = random_nyquist_free_state(g, 1, 9u);
    SpectralState v = velocity_solve(w);

    auto kx = axis_wavenumbers(g, true);
    double div_max = 0.0;
    for (int ix = 0; ix < 32; ++ix)
        for (int iy = 0; iy < 32; ++iy) {
            Complex d = Complex(0, kx[ix]) * v.channels[0][ix * 32 + iy] +
                        Complex(0, kx[iy]) * v.channels[1][ix * 32 + iy];
            div_max = std::max(div_max, std::abs(d));
        }
    CHECK(div_max < 1e-12);

    // curl(v) = d_x v_y - d_y v_x recovers vorticity minus its mean.
    SpectralState vx(g), vy(g);
    vx.channels[0] = v.channels[0];
    vy.channels[0] = v.channels[1];
    SpectralState curl = spectral_derivative(vy, 1, 0);
    SpectralState dvx = spectral_derivative(vx, 1, 1);
    double err = 0.0;
    for (int i = 0; i < g.num_points(); ++i) {
        Complex c = curl.channels[0][i] - dvx.channels[0][i];
        Complex expect = i == 0 ? Complex(0, 0) : w.channels[0][i];
        err = std::max(err, std::abs(c - expect));
    }
    CHECK(err < 1e-10);
}

TEST_CASE("velocity solve rejects 1d input") {
    Grid g(1, 16, kTwoPi);
    CHECK_THROWS_WITH_AS(velocity_solve(SpectralState(g)),
                         "velocity-solve requires 2D", std::invalid_argument);
}
