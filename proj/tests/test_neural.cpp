#include <doctest.h>

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "specml/checkpoint.hpp"
#include "specml/epd.hpp"
#include "specml/optim.hpp"
#include "specml/rng.hpp"
#include "specml/spectral_ops.hpp"
#include "specml/tape.hpp"
#include "specml/tensor.hpp"

using namespace specml;

namespace {

Tensor random_tensor(int dims, int nx, int ny, int channels, unsigned seed) {
    Rng rng(seed);
    Tensor t(dims, nx, ny, channels);
    for (double& v : t.data) v = rng.normal();
    return t;
}

/// Central finite difference of f at x[i].
template <typename F>
double fd_at(F&& f, Tensor& x, int64_t i, double h = 1e-6) {
    double saved = x.data[i];
    x.data[i] = saved + h;
    double up = f();
    x.data[i] = saved - h;
    double down = f();
    x.data[i] = saved;
    return (up - down) / (2.0 * h);
}

double rel_err(double a, double b) {
    double denom = std::max({std::abs(a), std::abs(b), 1e-10});
    return std::abs(a - b) / denom;
}

Tensor circular_shift(const Tensor& t, int sx, int sy) {
    Tensor out = t;
    for (int x = 0; x < t.nx; ++x)
        for (int y = 0; y < t.ny; ++y)
            for (int c = 0; c < t.channels; ++c) {
                int xs = (x + sx) % t.nx, ys = (y + sy) % t.ny;
                if (t.dims == 1)
                    out.at(xs, c) = t.at(x, c);
                else
                    out.at(xs, ys, c) = t.at(x, y, c);
            }
    return out;
}

}  // namespace

TEST_CASE("rng streams are deterministic and truncation bounds hold") {
    Rng a(123), b(123), c(124);
    for (int i = 0; i < 100; ++i) {
        double va = a.normal();
        CHECK(va == b.normal());
        (void)c.normal();
    }
    Rng d1 = Rng(123).derive(7), d2 = Rng(123).derive(8);
    CHECK(d1.normal() != d2.normal());

    Rng t(5);
    double sum = 0.0, sq = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        double z = t.truncated_normal(0.25);
        CHECK(std::abs(z) <= 0.5);  // 2 sigma cut
        sum += z;
    }
    CHECK(std::abs(sum / n) < 0.02);

    Rng g(6);
    for (int i = 0; i < n; ++i) {
        double z = g.normal();
        sq += z * z;
    }
    CHECK(std::sqrt(sq / n) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("gradient of half the squared norm is the parameter itself") {
    Tape tape;
    Tensor p = random_tensor(1, 8, 1, 3, 1u);
    Var vp = tape.leaf(p);
    Var loss = tape.scale(tape.sum_squares(vp), 0.5);
    tape.backward(loss);
    const Tensor& g = tape.grad(vp);
    for (int64_t i = 0; i < p.numel(); ++i)
        CHECK(g.data[i] == doctest::Approx(p.data[i]).epsilon(1e-14));
}

TEST_CASE("elementwise op gradients match finite differences") {
    Tensor xa = random_tensor(1, 16, 1, 2, 2u);
    Tensor xb = random_tensor(1, 16, 1, 2, 3u);

    auto loss_value = [&]() {
        Tape t;
        Var a = t.leaf(xa), b = t.leaf(xb);
        Var e = t.add_scaled(t.mul(t.add(a, b), t.sub(a, b)), t.relu(b), 0.7);
        e = t.clamp_max(e, 1.5);
        return t.value(t.sum_squares(e)).data[0];
    };

    Tape t;
    Var a = t.leaf(xa), b = t.leaf(xb);
    Var e = t.add_scaled(t.mul(t.add(a, b), t.sub(a, b)), t.relu(b), 0.7);
    e = t.clamp_max(e, 1.5);
    t.backward(t.sum_squares(e));

    for (int64_t i = 0; i < xa.numel(); i += 3)
        CHECK(rel_err(t.grad(a).data[i], fd_at(loss_value, xa, i)) < 1e-5);
    for (int64_t i = 0; i < xb.numel(); i += 3)
        CHECK(rel_err(t.grad(b).data[i], fd_at(loss_value, xb, i)) < 1e-5);
}

TEST_CASE("backward requires a scalar and resets between calls") {
    Tape t;
    Var a = t.leaf(random_tensor(1, 4, 1, 1, 4u));
    CHECK_THROWS_AS(t.backward(a), std::invalid_argument);

    Var loss = t.sum_squares(a);
    t.backward(loss);
    Tensor g1 = t.grad(a);
    t.backward(loss);
    const Tensor& g2 = t.grad(a);
    for (int64_t i = 0; i < g1.numel(); ++i) CHECK(g1.data[i] == g2.data[i]);
}

TEST_CASE("sign op computes forward values but refuses gradients") {
    Tape t;
    Tensor x(1, 4, 1, 1);
    x.data = {-2.0, 0.0, 3.5, -0.1};
    Var v = t.leaf(x);
    Var s = t.sign(v);
    CHECK(t.value(s).data[0] == -1.0);
    CHECK(t.value(s).data[1] == 0.0);
    CHECK(t.value(s).data[2] == 1.0);

    Var loss = t.sum_squares(s);
    CHECK_THROWS_WITH_AS(t.backward(loss),
                         "op 'sign' has no registered gradient",
                         std::runtime_error);

    // A sign node off the gradient path must not interfere.
    Tape t2;
    Var a = t2.leaf(x);
    (void)t2.sign(a);
    Var ok = t2.sum_squares(a);
    CHECK_NOTHROW(t2.backward(ok));
}

TEST_CASE("identity kernel convolution returns its input") {
    Tape t;
    Tensor in = random_tensor(1, 16, 1, 3, 5u);
    Tensor w(2, 5, 3, 3);  // (k, cin, cout)
    for (int ci = 0; ci < 3; ++ci) w.at(2, ci, ci) = 1.0;  // center tap
    Tensor b(1, 1, 1, 3);
    Var out = t.conv(t.leaf(in), t.leaf(w), t.leaf(b), 1);
    for (int64_t i = 0; i < in.numel(); ++i)
        CHECK(t.value(out).data[i] == in.data[i]);
}

TEST_CASE("constant input convolution scales by the kernel sum") {
    Tape t;
    Tensor in(1, 12, 1, 1);
    for (double& v : in.data) v = 2.0;
    Tensor w = random_tensor(2, 3, 1, 1, 6u);
    double s = w.data[0] + w.data[1] + w.data[2];
    Tensor b(1, 1, 1, 1);
    b.data[0] = 0.25;
    Var out = t.conv(t.leaf(in), t.leaf(w), t.leaf(b), 1);
    for (int x = 0; x < 12; ++x)
        CHECK(t.value(out).at(x, 0) == doctest::Approx(2.0 * s + 0.25).epsilon(1e-14));
}

TEST_CASE("convolution is translation-equivariant") {
    Tensor w1 = random_tensor(2, 3, 2, 4, 7u);  // 1D (k, cin, cout)
    Tensor b1 = random_tensor(1, 1, 1, 4, 8u);
    Tensor in1 = random_tensor(1, 16, 1, 2, 9u);
    {
        Tape t;
        Var base = t.conv(t.leaf(in1), t.leaf(w1), t.leaf(b1), 2);
        Var shifted = t.conv(t.leaf(circular_shift(in1, 5, 0)), t.leaf(w1),
                             t.leaf(b1), 2);
        Tensor expect = circular_shift(t.value(base), 5, 0);
        for (int64_t i = 0; i < expect.numel(); ++i)
            CHECK(t.value(shifted).data[i] == expect.data[i]);
    }

    Tensor w2 = random_tensor(2, 3, 3, 2 * 3, 10u);  // 2D (k, k, ci*co)
    Tensor b2 = random_tensor(1, 1, 1, 3, 11u);
    Tensor in2 = random_tensor(2, 8, 8, 2, 12u);
    {
        Tape t;
        Var base = t.conv(t.leaf(in2), t.leaf(w2), t.leaf(b2), 1);
        Var shifted = t.conv(t.leaf(circular_shift(in2, 3, 6)), t.leaf(w2),
                             t.leaf(b2), 1);
        Tensor expect = circular_shift(t.value(base), 3, 6);
        for (int64_t i = 0; i < expect.numel(); ++i)
            CHECK(t.value(shifted).data[i] == expect.data[i]);
    }
}

TEST_CASE("convolution validates shapes and dilation") {
    Tape t;
    Var in = t.leaf(random_tensor(1, 8, 1, 2, 13u));
    Var w = t.leaf(random_tensor(2, 3, 2, 4, 14u));
    Var b = t.leaf(Tensor(1, 1, 1, 4));
    CHECK_NOTHROW(t.conv(in, w, b, 1));
    CHECK_THROWS_WITH_AS(t.conv(in, w, b, 4),
                         "conv: dilation too large for grid",
                         std::invalid_argument);
    CHECK_THROWS_AS(t.conv(in, w, b, 0), std::invalid_argument);

    Var w_bad = t.leaf(random_tensor(2, 3, 3, 4, 15u));  // cin mismatch
    CHECK_THROWS_AS(t.conv(in, w_bad, b, 1), std::invalid_argument);
    Var w_even = t.leaf(random_tensor(2, 4, 2, 4, 16u));
    CHECK_THROWS_AS(t.conv(in, w_even, b, 1), std::invalid_argument);
    Var b_bad = t.leaf(Tensor(1, 1, 1, 3));
    CHECK_THROWS_AS(t.conv(in, w, b_bad, 1), std::invalid_argument);
}

TEST_CASE("two-layer network gradients match finite differences") {
    Tensor in = random_tensor(1, 12, 1, 1, 17u);
    Tensor w1 = random_tensor(2, 3, 1, 4, 18u);
    Tensor b1 = random_tensor(1, 1, 1, 4, 19u);
    Tensor w2 = random_tensor(2, 3, 4, 1, 20u);
    Tensor b2 = random_tensor(1, 1, 1, 1, 21u);

    auto loss_value = [&]() {
        Tape t;
        Var h = t.relu(t.conv(t.leaf(in), t.leaf(w1), t.leaf(b1), 1));
        Var out = t.conv(h, t.leaf(w2), t.leaf(b2), 2);
        return t.value(t.sum_squares(out)).data[0];
    };

    Tape t;
    Var vin = t.leaf(in), vw1 = t.leaf(w1), vb1 = t.leaf(b1),
        vw2 = t.leaf(w2), vb2 = t.leaf(b2);
    Var h = t.relu(t.conv(vin, vw1, vb1, 1));
    t.backward(t.sum_squares(t.conv(h, vw2, vb2, 2)));

    struct Entry { Tensor* host; Var var; };
    for (auto [host, var] : {Entry{&in, vin}, Entry{&w1, vw1}, Entry{&b1, vb1},
                             Entry{&w2, vw2}, Entry{&b2, vb2}})
        for (int64_t i = 0; i < host->numel(); ++i)
            CHECK(rel_err(t.grad(var).data[i], fd_at(loss_value, *host, i)) <
                  1e-5);
}

TEST_CASE("spectral_scale matches the spectral derivative and its adjoint") {
    Grid g(1, 32, kTwoPi);
    Symbol d1 = make_symbol(derivative_symbol(g, 1, 0));

    Tensor x = random_tensor(1, 32, 1, 1, 22u);
    Tape t;
    Var vx = t.leaf(x);
    Var dx = t.spectral_scale(vx, d1);

    RealField f(g);
    f.channels[0] = x.data;
    RealField expect = to_real(spectral_derivative(to_spectral(f), 1));
    for (int i = 0; i < 32; ++i)
        CHECK(t.value(dx).data[i] == doctest::Approx(expect.channels[0][i]).epsilon(1e-12));

    // Adjoint identity <D x, y> = <x, D* y> via the VJP.
    Tensor y = random_tensor(1, 32, 1, 1, 23u);
    Tape t2;
    Var vx2 = t2.leaf(x);
    Var inner = t2.sum_squares(t2.add(t2.spectral_scale(vx2, d1), t2.leaf(y)));
    t2.backward(inner);

    auto loss_value = [&]() {
        Tape tt;
        Var a = tt.spectral_scale(tt.leaf(x), d1);
        return tt.value(tt.sum_squares(tt.add(a, tt.leaf(y)))).data[0];
    };
    for (int64_t i = 0; i < x.numel(); i += 2)
        CHECK(rel_err(t2.grad(vx2).data[i], fd_at(loss_value, x, i)) < 1e-5);
}

TEST_CASE("epd with zero parameters returns zero") {
    EpdConfig cfg = epd_config_1d(1, 1, 8);
    Rng rng(1);
    EpdParams params = init_epd_params(cfg, rng);
    for (Tensor* p : epd_param_tensors(params))
        for (double& v : p->data) v = 0.0;
    Tensor out = epd_apply(cfg, params, random_tensor(1, 32, 1, 1, 24u));
    for (double v : out.data) CHECK(v == 0.0);
}

TEST_CASE("epd output shape equals input spatial shape") {
    for (int n : {32, 64}) {
        EpdConfig cfg1 = epd_config_1d(2, 1, 8);
        Rng r1(2);
        EpdParams p1 = init_epd_params(cfg1, r1);
        Tensor out1 = epd_apply(cfg1, p1, random_tensor(1, n, 1, 2, 25u));
        CHECK(out1.nx == n);
        CHECK(out1.channels == 1);

        EpdConfig cfg2 = epd_config_2d(2, 1, 4);
        Rng r2(3);
        EpdParams p2 = init_epd_params(cfg2, r2);
        Tensor out2 = epd_apply(cfg2, p2, random_tensor(2, n, n, 2, 26u));
        CHECK(out2.nx == n);
        CHECK(out2.ny == n);
        CHECK(out2.channels == 1);
    }
}

TEST_CASE("epd is translation-equivariant") {
    EpdConfig cfg = epd_config_2d(2, 1, 4);
    Rng rng(4);
    EpdParams params = init_epd_params(cfg, rng);
    Tensor in = random_tensor(2, 16, 16, 2, 27u);
    Tensor base = epd_apply(cfg, params, in);
    Tensor shifted = epd_apply(cfg, params, circular_shift(in, 5, 11));
    Tensor expect = circular_shift(base, 5, 11);
    for (int64_t i = 0; i < expect.numel(); ++i)
        CHECK(shifted.data[i] == doctest::Approx(expect.data[i]).epsilon(1e-12));
}

TEST_CASE("epd parameter counts match the shape algebra") {
    // 2D: enc 5*5*2*64+64, four process convs 3*3*64*64+64, dec 5*5*64*1+1.
    CHECK(epd_param_count(epd_config_2d(2, 1, 64)) == 152577);
    // 1D: enc 5*1*128+128, nine process convs 3*128*128+128, dec 5*128*1+1.
    CHECK(epd_param_count(epd_config_1d(1, 1, 128)) == 444929);

    EpdConfig cfg = epd_config_2d(2, 1, 64);
    Rng rng(5);
    EpdParams params = init_epd_params(cfg, rng);
    int64_t total = 0;
    for (const Tensor* p : epd_param_tensors(params)) total += p->numel();
    CHECK(total == 152577);
    CHECK(epd_param_names(cfg).size() == epd_param_tensors(params).size());
}

TEST_CASE("epd init: zero biases, bounded weights, seed-deterministic") {
    EpdConfig cfg = epd_config_1d(1, 1, 16);
    Rng r1(42), r2(42), r3(43);
    EpdParams a = init_epd_params(cfg, r1);
    EpdParams b = init_epd_params(cfg, r2);
    EpdParams c = init_epd_params(cfg, r3);

    CHECK(std::abs(a.encoder.bias.data[0]) == 0.0);
    double enc_bound = 2.0 / std::sqrt(5.0 * 1.0);
    for (double w : a.encoder.weight.data) CHECK(std::abs(w) <= enc_bound);
    double proc_bound = 2.0 / std::sqrt(3.0 * 16.0);
    for (double w : a.blocks[0][0].weight.data) CHECK(std::abs(w) <= proc_bound);

    auto va = epd_param_tensors(a), vb = epd_param_tensors(b),
         vc = epd_param_tensors(c);
    bool all_same = true, any_diff = false;
    for (size_t i = 0; i < va.size(); ++i)
        for (int64_t j = 0; j < va[i]->numel(); ++j) {
            all_same = all_same && va[i]->data[j] == vb[i]->data[j];
            any_diff = any_diff || va[i]->data[j] != vc[i]->data[j];
        }
    CHECK(all_same);
    CHECK(any_diff);
}

TEST_CASE("epd gradients match finite differences on every variant") {
    struct Case { EpdConfig cfg; Tensor input; };
    std::vector<Case> cases;
    cases.push_back({epd_config_1d(1, 1, 3), random_tensor(1, 16, 1, 1, 28u)});
    cases.push_back({epd_config_2d(2, 1, 2), random_tensor(2, 8, 8, 2, 29u)});
    cases.push_back(
        {epd_config_2d(1, 1, 2, true), random_tensor(2, 16, 16, 1, 30u)});

    for (auto& [cfg, input] : cases) {
        Rng rng(6);
        EpdParams params = init_epd_params(cfg, rng);
        // Zero biases put ReLU inputs exactly on the kink wherever a
        // receptive field is fully clipped; nudge them off it.
        for (Tensor* p : epd_param_tensors(params))
            if (p->spatial_size() == 1)
                for (double& v : p->data) v = 0.05 * rng.normal();

        auto loss_value = [&]() {
            Tape t;
            EpdVars vars = epd_lift(t, params);
            Var out = epd_forward(t, cfg, vars, t.leaf(input));
            return t.value(t.sum_squares(out)).data[0];
        };

        Tape t;
        EpdVars vars = epd_lift(t, params);
        Var out = epd_forward(t, cfg, vars, t.leaf(input));
        t.backward(t.sum_squares(out));

        auto hosts = epd_param_tensors(params);
        int skipped = 0, checked = 0;
        for (size_t pi = 0; pi < hosts.size(); ++pi) {
            int64_t n = hosts[pi]->numel();
            int64_t step = std::max<int64_t>(1, n / 7);
            for (int64_t i = 0; i < n; i += step) {
                // A ReLU kink inside the stencil makes central differences
                // meaningless; two step sizes agree only where the loss is
                // locally smooth.
                double fd1 = fd_at(loss_value, *hosts[pi], i, 1e-6);
                double fd2 = fd_at(loss_value, *hosts[pi], i, 5e-7);
                if (rel_err(fd1, fd2) > 1e-4) {
                    ++skipped;
                    continue;
                }
                ++checked;
                CHECK(rel_err(t.grad(vars.vars[pi]).data[i], fd1) < 1e-5);
            }
        }
        CHECK(checked > 20);
        CHECK(skipped <= 3);
    }
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
    Tensor p = random_tensor(1, 6, 1, 1, 31u);
    Tensor saved = p;
    Tensor g(1, 6, 1, 1);
    std::vector<Tensor*> params{&p};
    AdamState st = make_adam_state(params);
    adam_update(AdamConfig{}, st, params, {&g});
    for (int64_t i = 0; i < p.numel(); ++i) CHECK(p.data[i] == saved.data[i]);
}

TEST_CASE("adam first step approximates -lr * sign(gradient)") {
    Tensor p(1, 4, 1, 1);
    Tensor g(1, 4, 1, 1);
    g.data = {3.0, -0.5, 10.0, -2e-4};
    std::vector<Tensor*> params{&p};
    AdamState st = make_adam_state(params);
    AdamConfig cfg;
    cfg.lr = 1e-3;
    adam_update(cfg, st, params, {&g});
    for (int i = 0; i < 3; ++i) {
        double expect = -cfg.lr * (g.data[i] > 0 ? 1.0 : -1.0);
        CHECK(p.data[i] == doctest::Approx(expect).epsilon(1e-4));
    }
    CHECK(st.step == 1);
}

TEST_CASE("adam bias correction: constant gradient repeats the first step") {
    // With constant g the bias corrections give m_hat = g, v_hat = g^2 at
    // every step, so the update never changes.
    Tensor p(1, 1, 1, 1);
    Tensor g = Tensor::scalar(2.0);
    std::vector<Tensor*> params{&p};
    AdamState st = make_adam_state(params);
    AdamConfig cfg;
    adam_update(cfg, st, params, {&g});
    double first = p.data[0];
    adam_update(cfg, st, params, {&g});
    double second = p.data[0] - first;
    CHECK(second == doctest::Approx(first).epsilon(1e-14));
    CHECK(first == doctest::Approx(-cfg.lr * 2.0 / (2.0 + cfg.eps))
                       .epsilon(1e-14));
}

TEST_CASE("adam: an opposing gradient shrinks the step") {
    Tensor p(1, 1, 1, 1);
    Tensor g_pos = Tensor::scalar(2.0), g_neg = Tensor::scalar(-2.0);
    std::vector<Tensor*> params{&p};
    AdamState st = make_adam_state(params);
    AdamConfig cfg;
    adam_update(cfg, st, params, {&g_pos});
    double first = std::abs(p.data[0]);
    double before = p.data[0];
    adam_update(cfg, st, params, {&g_neg});
    double second = p.data[0] - before;
    CHECK(std::abs(second) < first);

    double m2 = cfg.beta1 * (1 - cfg.beta1) * 2.0 + (1 - cfg.beta1) * (-2.0);
    double v2 = cfg.beta2 * (1 - cfg.beta2) * 4.0 + (1 - cfg.beta2) * 4.0;
    double m_hat = m2 / (1 - cfg.beta1 * cfg.beta1);
    double v_hat = v2 / (1 - cfg.beta2 * cfg.beta2);
    double expect = -cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    CHECK(second == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("ema follows its geometric fixed-point arithmetic") {
    Tensor p = Tensor::scalar(1.0);
    std::vector<Tensor*> params{&p};

    std::vector<Tensor> ema{Tensor::scalar(1.0)};
    ema_update(ema, params, 0.98);
    CHECK(ema[0].data[0] == doctest::Approx(1.0).epsilon(1e-15));

    ema[0].data[0] = 0.0;
    ema_update(ema, params, 0.98);
    CHECK(ema[0].data[0] == doctest::Approx(0.02).epsilon(1e-15));

    ema[0].data[0] = 0.0;
    for (int n = 1; n <= 50; ++n) {
        ema_update(ema, params, 0.98);
        CHECK(1.0 - ema[0].data[0] ==
              doctest::Approx(std::pow(0.98, n)).epsilon(1e-12));
    }
}

TEST_CASE("checkpoints round trip bit-exactly") {
    EpdConfig cfg = epd_config_1d(1, 1, 8);
    Rng rng(7);
    EpdParams params = init_epd_params(cfg, rng);
    auto names = epd_param_names(cfg);
    auto tensors = epd_param_tensors(params);

    std::vector<std::pair<std::string, const Tensor*>> arrays;
    for (size_t i = 0; i < names.size(); ++i)
        arrays.emplace_back(names[i], tensors[i]);

    std::string path = "test_ck.bin";
    save_checkpoint(path, "{\"width\":8}", arrays);
    Checkpoint ck = load_checkpoint(path);
    CHECK(ck.config_json == "{\"width\":8}");
    REQUIRE(ck.arrays.size() == arrays.size());
    for (size_t i = 0; i < arrays.size(); ++i) {
        const Tensor* loaded = ck.find(names[i]);
        REQUIRE(loaded != nullptr);
        REQUIRE(loaded->same_shape(*tensors[i]));
        for (int64_t j = 0; j < loaded->numel(); ++j)
            CHECK(loaded->data[j] == tensors[i]->data[j]);
    }
    std::remove(path.c_str());
}

TEST_CASE("checkpoint loader rejects damage, bad magic, bad version") {
    std::string path = "test_ck2.bin";
    Tensor t = random_tensor(1, 8, 1, 2, 32u);
    save_checkpoint(path, "{}", {{"x", &t}});

    auto read_all = [&]() {
        std::ifstream in(path, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };
    auto write_all = [&](const std::string& s) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(s.data(), static_cast<std::streamsize>(s.size()));
    };
    std::string good = read_all();

    std::string corrupt = good;
    corrupt[good.size() / 2] ^= 0x42;
    write_all(corrupt);
    CHECK_THROWS_WITH_AS(load_checkpoint(path), "checkpoint corrupt",
                         std::runtime_error);

    std::string bad_magic = good;
    bad_magic[0] = 'X';
    write_all(bad_magic);
    CHECK_THROWS_WITH_AS(load_checkpoint(path), "not a checkpoint file",
                         std::runtime_error);

    // Bump the version (first u32 after the magic) and refresh the trailing
    // crc32 so the loader reaches the version check.
    std::string bad_version = good;
    uint32_t v99 = 99;
    std::memcpy(bad_version.data() + 8, &v99, 4);
    uint32_t crc = static_cast<uint32_t>(crc32(
        0, reinterpret_cast<const unsigned char*>(bad_version.data() + 8),
        static_cast<unsigned>(bad_version.size() - 12)));
    std::memcpy(bad_version.data() + bad_version.size() - 4, &crc, 4);
    write_all(bad_version);
    CHECK_THROWS_WITH_AS(load_checkpoint(path), "unsupported checkpoint version",
                         std::runtime_error);

    CHECK_THROWS_AS(load_checkpoint("no_such_file.bin"), std::runtime_error);
    std::remove(path.c_str());
}
