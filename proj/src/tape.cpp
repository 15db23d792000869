#include "specml/tape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "specml/fft.hpp"
#include "specml/grid.hpp"

namespace specml {

using Complex = std::complex<double>;

Symbol make_symbol(std::vector<Complex> values) {
    return std::make_shared<const std::vector<Complex>>(std::move(values));
}

Symbol make_symbol(const std::vector<double>& values) {
    std::vector<Complex> c(values.size());
    for (size_t i = 0; i < values.size(); ++i) c[i] = Complex(values[i], 0.0);
    return make_symbol(std::move(c));
}

void Tape::check(Var v) const {
    if (v.id < 0 || v.id >= static_cast<int>(nodes_.size()))
        throw std::invalid_argument("invalid tape variable");
}

Var Tape::push(Tensor value, const char* op,
               std::function<void(Tape&, const Tensor&)> pull) {
    nodes_.push_back(Node{std::move(value), op, std::move(pull)});
    return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::leaf(Tensor value) { return push(std::move(value), "leaf", nullptr); }

const Tensor& Tape::value(Var v) const {
    check(v);
    return nodes_[v.id].value;
}

Tensor& Tape::grad_buffer(int id) {
    if (grads_.size() != nodes_.size()) {
        grads_.resize(nodes_.size());
        has_grad_.resize(nodes_.size(), 0);
    }
    if (!has_grad_[id]) {
        const Tensor& v = nodes_[id].value;
        grads_[id] = Tensor(v.dims, v.nx, v.ny, v.channels);
        has_grad_[id] = 1;
    }
    return grads_[id];
}

const Tensor& Tape::grad(Var v) {
    check(v);
    return grad_buffer(v.id);
}

void Tape::accumulate(int id, const Tensor& g) {
    Tensor& buf = grad_buffer(id);
    for (int64_t i = 0; i < g.numel(); ++i) buf.data[i] += g.data[i];
}

void Tape::reset_grads() {
    grads_.clear();
    has_grad_.clear();
}

void Tape::backward(Var output) {
    check(output);
    if (nodes_[output.id].value.numel() != 1)
        throw std::invalid_argument("backward requires a scalar output");
    reset_grads();
    grad_buffer(output.id).data[0] = 1.0;
    for (int id = output.id; id >= 0; --id) {
        if (!has_grad_[id] || !nodes_[id].pull) continue;
        nodes_[id].pull(*this, grads_[id]);
    }
}

Var Tape::add(Var a, Var b) {
    check(a);
    check(b);
    const Tensor &va = value(a), &vb = value(b);
    require_same_shape(va, vb, "add");
    Tensor out = va;
    for (int64_t i = 0; i < out.numel(); ++i) out.data[i] += vb.data[i];
    return push(std::move(out), "add", [a, b](Tape& t, const Tensor& g) {
        t.accumulate(a.id, g);
        t.accumulate(b.id, g);
    });
}

Var Tape::sub(Var a, Var b) {
    check(a);
    check(b);
    const Tensor &va = value(a), &vb = value(b);
    require_same_shape(va, vb, "sub");
    Tensor out = va;
    for (int64_t i = 0; i < out.numel(); ++i) out.data[i] -= vb.data[i];
    return push(std::move(out), "sub", [a, b](Tape& t, const Tensor& g) {
        t.accumulate(a.id, g);
        Tensor& gb = t.grad_buffer(b.id);
        for (int64_t i = 0; i < g.numel(); ++i) gb.data[i] -= g.data[i];
    });
}

Var Tape::mul(Var a, Var b) {
    check(a);
    check(b);
    const Tensor &va = value(a), &vb = value(b);
    require_same_shape(va, vb, "mul");
    Tensor out = va;
    for (int64_t i = 0; i < out.numel(); ++i) out.data[i] *= vb.data[i];
    return push(std::move(out), "mul", [a, b](Tape& t, const Tensor& g) {
        const Tensor &va = t.value(a), &vb = t.value(b);
        Tensor& ga = t.grad_buffer(a.id);
        Tensor& gb = t.grad_buffer(b.id);
        for (int64_t i = 0; i < g.numel(); ++i) {
            ga.data[i] += vb.data[i] * g.data[i];
            gb.data[i] += va.data[i] * g.data[i];
        }
    });
}

Var Tape::scale(Var a, double s) {
    check(a);
    Tensor out = value(a);
    for (double& v : out.data) v *= s;
    return push(std::move(out), "scale", [a, s](Tape& t, const Tensor& g) {
        Tensor& ga = t.grad_buffer(a.id);
        for (int64_t i = 0; i < g.numel(); ++i) ga.data[i] += s * g.data[i];
    });
}

Var Tape::add_scaled(Var a, Var b, double s) {
    check(a);
    check(b);
    const Tensor &va = value(a), &vb = value(b);
    require_same_shape(va, vb, "add_scaled");
    Tensor out = va;
    for (int64_t i = 0; i < out.numel(); ++i) out.data[i] += s * vb.data[i];
    return push(std::move(out), "add_scaled", [a, b, s](Tape& t, const Tensor& g) {
        t.accumulate(a.id, g);
        Tensor& gb = t.grad_buffer(b.id);
        for (int64_t i = 0; i < g.numel(); ++i) gb.data[i] += s * g.data[i];
    });
}

Var Tape::relu(Var a) {
    check(a);
    Tensor out = value(a);
    for (double& v : out.data) v = std::max(v, 0.0);
    return push(std::move(out), "relu", [a](Tape& t, const Tensor& g) {
        const Tensor& va = t.value(a);
        Tensor& ga = t.grad_buffer(a.id);
        for (int64_t i = 0; i < g.numel(); ++i)
            if (va.data[i] > 0.0) ga.data[i] += g.data[i];
    });
}

namespace {

inline int wrap(int i, int n) {
    i %= n;
    return i < 0 ? i + n : i;
}

struct ConvShape {
    int k = 0, cin = 0, cout = 0;
};

ConvShape check_conv(const Tensor& in, const Tensor& w, const Tensor& b,
                     int dilation) {
    ConvShape s;
    s.cin = in.channels;
    if (dilation < 1) throw std::invalid_argument("conv: dilation must be >= 1");
    if (in.dims == 1) {
        // weight layout (k, cin, cout) as (nx, ny, channels)
        s.k = w.nx;
        if (w.ny != s.cin)
            throw std::invalid_argument("conv: weight input channels mismatch");
        s.cout = w.channels;
    } else {
        // weight layout (k, k, ci*cout) with channel index ci*cout + co
        s.k = w.nx;
        if (w.ny != w.nx)
            throw std::invalid_argument("conv: 2D kernel must be square");
        if (w.channels % s.cin != 0)
            throw std::invalid_argument("conv: weight input channels mismatch");
        s.cout = w.channels / s.cin;
    }
    if (s.k % 2 == 0) throw std::invalid_argument("conv: kernel must be odd");
    if (b.numel() != s.cout)
        throw std::invalid_argument("conv: bias size mismatch");
    int extent = in.dims == 1 ? in.nx : std::min(in.nx, in.ny);
    if (dilation * (s.k - 1) >= extent)
        throw std::invalid_argument("conv: dilation too large for grid");
    return s;
}

Tensor conv_forward(const Tensor& in, const Tensor& w, const Tensor& b,
                    int dilation, const ConvShape& s) {
    if (in.dims == 1) {
        Tensor out(1, in.nx, 1, s.cout);
        for (int x = 0; x < in.nx; ++x) {
            double* orow = &out.data[static_cast<size_t>(x) * s.cout];
            for (int co = 0; co < s.cout; ++co) orow[co] = b.data[co];
            for (int t = 0; t < s.k; ++t) {
                int xi = wrap(x + (t - s.k / 2) * dilation, in.nx);
                const double* irow = &in.data[static_cast<size_t>(xi) * s.cin];
                const double* wslab =
                    &w.data[static_cast<size_t>(t) * s.cin * s.cout];
                for (int ci = 0; ci < s.cin; ++ci) {
                    double v = irow[ci];
                    const double* wrow = wslab + static_cast<size_t>(ci) * s.cout;
                    for (int co = 0; co < s.cout; ++co) orow[co] += v * wrow[co];
                }
            }
        }
        return out;
    }
    Tensor out(2, in.nx, in.ny, s.cout);
    for (int x = 0; x < in.nx; ++x)
        for (int y = 0; y < in.ny; ++y) {
            double* orow = &out.data[(static_cast<size_t>(x) * in.ny + y) * s.cout];
            for (int co = 0; co < s.cout; ++co) orow[co] = b.data[co];
            for (int tx = 0; tx < s.k; ++tx) {
                int xi = wrap(x + (tx - s.k / 2) * dilation, in.nx);
                for (int ty = 0; ty < s.k; ++ty) {
                    int yi = wrap(y + (ty - s.k / 2) * dilation, in.ny);
                    const double* irow =
                        &in.data[(static_cast<size_t>(xi) * in.ny + yi) * s.cin];
                    const double* wslab =
                        &w.data[(static_cast<size_t>(tx) * s.k + ty) * s.cin *
                                s.cout];
                    for (int ci = 0; ci < s.cin; ++ci) {
                        double v = irow[ci];
                        const double* wrow =
                            wslab + static_cast<size_t>(ci) * s.cout;
                        for (int co = 0; co < s.cout; ++co)
                            orow[co] += v * wrow[co];
                    }
                }
            }
        }
    return out;
}

void conv_backward(const Tensor& in, const Tensor& w, int dilation,
                   const ConvShape& s, const Tensor& gout, Tensor& gin,
                   Tensor& gw, Tensor& gb) {
    if (in.dims == 1) {
        for (int x = 0; x < in.nx; ++x) {
            const double* grow = &gout.data[static_cast<size_t>(x) * s.cout];
            for (int co = 0; co < s.cout; ++co) gb.data[co] += grow[co];
            for (int t = 0; t < s.k; ++t) {
                int xi = wrap(x + (t - s.k / 2) * dilation, in.nx);
                const double* irow = &in.data[static_cast<size_t>(xi) * s.cin];
                double* girow = &gin.data[static_cast<size_t>(xi) * s.cin];
                const double* wslab =
                    &w.data[static_cast<size_t>(t) * s.cin * s.cout];
                double* gwslab =
                    &gw.data[static_cast<size_t>(t) * s.cin * s.cout];
                for (int ci = 0; ci < s.cin; ++ci) {
                    const double* wrow = wslab + static_cast<size_t>(ci) * s.cout;
                    double* gwrow = gwslab + static_cast<size_t>(ci) * s.cout;
                    double v = irow[ci];
                    double acc = 0.0;
                    for (int co = 0; co < s.cout; ++co) {
                        acc += wrow[co] * grow[co];
                        gwrow[co] += v * grow[co];
                    }
                    girow[ci] += acc;
                }
            }
        }
        return;
    }
    for (int x = 0; x < in.nx; ++x)
        for (int y = 0; y < in.ny; ++y) {
            const double* grow =
                &gout.data[(static_cast<size_t>(x) * in.ny + y) * s.cout];
            for (int co = 0; co < s.cout; ++co) gb.data[co] += grow[co];
            for (int tx = 0; tx < s.k; ++tx) {
                int xi = wrap(x + (tx - s.k / 2) * dilation, in.nx);
                for (int ty = 0; ty < s.k; ++ty) {
                    int yi = wrap(y + (ty - s.k / 2) * dilation, in.ny);
                    const double* irow =
                        &in.data[(static_cast<size_t>(xi) * in.ny + yi) * s.cin];
                    double* girow =
                        &gin.data[(static_cast<size_t>(xi) * in.ny + yi) * s.cin];
                    const double* wslab =
                        &w.data[(static_cast<size_t>(tx) * s.k + ty) * s.cin *
                                s.cout];
                    double* gwslab =
                        &gw.data[(static_cast<size_t>(tx) * s.k + ty) * s.cin *
                                 s.cout];
                    for (int ci = 0; ci < s.cin; ++ci) {
                        const double* wrow =
                            wslab + static_cast<size_t>(ci) * s.cout;
                        double* gwrow =
                            gwslab + static_cast<size_t>(ci) * s.cout;
                        double v = irow[ci];
                        double acc = 0.0;
                        for (int co = 0; co < s.cout; ++co) {
                            acc += wrow[co] * grow[co];
                            gwrow[co] += v * grow[co];
                        }
                        girow[ci] += acc;
                    }
                }
            }
        }
}

}  // namespace

Var Tape::conv(Var input, Var weight, Var bias, int dilation) {
    check(input);
    check(weight);
    check(bias);
    const Tensor &in = value(input), &w = value(weight), &b = value(bias);
    ConvShape s = check_conv(in, w, b, dilation);
    Tensor out = conv_forward(in, w, b, dilation, s);
    return push(std::move(out), "conv",
                [input, weight, bias, dilation, s](Tape& t, const Tensor& g) {
                    conv_backward(t.value(input), t.value(weight), dilation, s,
                                  g, t.grad_buffer(input.id),
                                  t.grad_buffer(weight.id),
                                  t.grad_buffer(bias.id));
                });
}

Var Tape::spectral_scale(Var a, Symbol symbol) {
    check(a);
    const Tensor& in = value(a);
    if (in.dims == 2 && in.nx != in.ny)
        throw std::invalid_argument("spectral_scale requires a square grid");
    if (static_cast<int64_t>(symbol->size()) !=
        static_cast<int64_t>(in.nx) * in.ny)
        throw std::invalid_argument("spectral_scale: symbol size mismatch");

    Grid grid(in.dims, in.nx, 1.0);
    auto apply = [grid](const Tensor& x, const std::vector<Complex>& sym) {
        Tensor out(x.dims, x.nx, x.ny, x.channels);
        std::vector<Complex> buf(grid.num_points());
        for (int c = 0; c < x.channels; ++c) {
            for (int i = 0; i < grid.num_points(); ++i)
                buf[i] = Complex(x.data[static_cast<size_t>(i) * x.channels + c],
                                 0.0);
            fft_forward(grid, buf.data(), buf.data());
            for (int i = 0; i < grid.num_points(); ++i) buf[i] *= sym[i];
            fft_inverse(grid, buf.data(), buf.data());
            for (int i = 0; i < grid.num_points(); ++i)
                out.data[static_cast<size_t>(i) * x.channels + c] =
                    buf[i].real();
        }
        return out;
    };

    Tensor out = apply(in, *symbol);
    return push(std::move(out), "spectral_scale",
                [a, symbol, apply](Tape& t, const Tensor& g) {
                    std::vector<Complex> conj_sym(symbol->size());
                    for (size_t i = 0; i < symbol->size(); ++i)
                        conj_sym[i] = std::conj((*symbol)[i]);
                    t.accumulate(a.id, apply(g, conj_sym));
                });
}

Var Tape::sum_squares(Var a) {
    check(a);
    const Tensor& va = value(a);
    double s = 0.0;
    for (double v : va.data) s += v * v;
    return push(Tensor::scalar(s), "sum_squares",
                [a](Tape& t, const Tensor& g) {
                    const Tensor& va = t.value(a);
                    Tensor& ga = t.grad_buffer(a.id);
                    double g0 = g.data[0];
                    for (int64_t i = 0; i < va.numel(); ++i)
                        ga.data[i] += 2.0 * va.data[i] * g0;
                });
}

Var Tape::clamp_max(Var a, double cap) {
    check(a);
    Tensor out = value(a);
    for (double& v : out.data) v = std::min(v, cap);
    return push(std::move(out), "clamp_max",
                [a, cap](Tape& t, const Tensor& g) {
                    const Tensor& va = t.value(a);
                    Tensor& ga = t.grad_buffer(a.id);
                    for (int64_t i = 0; i < g.numel(); ++i)
                        if (va.data[i] < cap) ga.data[i] += g.data[i];
                });
}

Var Tape::sign(Var a) {
    check(a);
    Tensor out = value(a);
    for (double& v : out.data) v = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    return push(std::move(out), "sign", [](Tape&, const Tensor&) {
        throw std::runtime_error("op 'sign' has no registered gradient");
    });
}

Var Tape::concat_channels(const std::vector<Var>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat of no parts");
    for (Var v : parts) check(v);
    const Tensor& first = value(parts[0]);
    int channels = 0;
    for (Var v : parts) {
        const Tensor& p = value(v);
        if (p.dims != first.dims || p.nx != first.nx || p.ny != first.ny)
            throw std::invalid_argument("concat: grid mismatch " +
                                        p.shape_string() + " vs " +
                                        first.shape_string());
        channels += p.channels;
    }
    Tensor out(first.dims, first.nx, first.ny, channels);
    int spatial = first.spatial_size();
    int base = 0;
    for (Var v : parts) {
        const Tensor& p = value(v);
        for (int i = 0; i < spatial; ++i)
            for (int c = 0; c < p.channels; ++c)
                out.data[static_cast<size_t>(i) * channels + base + c] =
                    p.data[static_cast<size_t>(i) * p.channels + c];
        base += p.channels;
    }
    std::vector<Var> captured = parts;
    return push(std::move(out), "concat",
                [captured, spatial, channels](Tape& t, const Tensor& g) {
                    int base = 0;
                    for (Var v : captured) {
                        Tensor& gp = t.grad_buffer(v.id);
                        int pc = t.value(v).channels;
                        for (int i = 0; i < spatial; ++i)
                            for (int c = 0; c < pc; ++c)
                                gp.data[static_cast<size_t>(i) * pc + c] +=
                                    g.data[static_cast<size_t>(i) * channels +
                                           base + c];
                        base += pc;
                    }
                });
}

Var Tape::total(const std::vector<Var>& terms) {
    if (terms.empty()) throw std::invalid_argument("total of no terms");
    Tensor out = value(terms[0]);
    for (size_t i = 1; i < terms.size(); ++i) {
        const Tensor& v = value(terms[i]);
        require_same_shape(out, v, "total");
        for (int64_t j = 0; j < out.numel(); ++j) out.data[j] += v.data[j];
    }
    std::vector<Var> captured = terms;
    return push(std::move(out), "total",
                [captured](Tape& t, const Tensor& g) {
                    for (Var v : captured) t.accumulate(v.id, g);
                });
}

}  // namespace specml
