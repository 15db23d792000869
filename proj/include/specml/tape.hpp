#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "specml/tensor.hpp"

namespace specml {

/// Handle to a tape node.
struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
};

using Symbol = std::shared_ptr<const std::vector<std::complex<double>>>;

Symbol make_symbol(std::vector<std::complex<double>> values);
Symbol make_symbol(const std::vector<double>& values);

/// Reverse-mode autodiff over real tensors. Build a graph with the primitive
/// ops, call backward() on a scalar output, then read grad() of any node.
/// Gradient flow skips nodes whose output gradient is identically zero, so
/// ops without a registered gradient (sign) only fail when actually used.
class Tape {
  public:
    Var leaf(Tensor value);

    const Tensor& value(Var v) const;
    const Tensor& grad(Var v);  // zeros if no gradient flowed

    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var scale(Var a, double s);
    Var add_scaled(Var a, Var b, double s);  // a + s*b
    Var relu(Var a);
    /// Periodic (circular) convolution with bias. 1D weight (k, cin, cout),
    /// 2D weight (k, k, cin, cout); odd k; centered taps.
    Var conv(Var input, Var weight, Var bias, int dilation = 1);
    /// Per-channel Re(IFFT(symbol * FFT(x))) on the tensor's grid.
    Var spectral_scale(Var a, Symbol symbol);
    Var sum_squares(Var a);               // scalar
    Var clamp_max(Var a, double cap);     // min(x, cap) elementwise
    Var sign(Var a);                      // forward only; no gradient
    Var total(const std::vector<Var>& terms);  // elementwise sum
    /// Stack single-grid tensors along the channel axis.
    Var concat_channels(const std::vector<Var>& parts);

    /// Computes gradients of `output` (scalar) for every node it reaches.
    /// Discards gradients from any previous backward call.
    void backward(Var output);
    void reset_grads();

    size_t size() const { return nodes_.size(); }

  private:
    struct Node {
        Tensor value;
        const char* op;
        std::function<void(Tape&, const Tensor&)> pull;  // null for leaves
    };

    Var push(Tensor value, const char* op,
             std::function<void(Tape&, const Tensor&)> pull);
    Tensor& grad_buffer(int id);
    void accumulate(int id, const Tensor& g);
    void check(Var v) const;

    std::vector<Node> nodes_;
    std::vector<Tensor> grads_;
    std::vector<char> has_grad_;
};

}  // namespace specml
