#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specml/rng.hpp"
#include "specml/tape.hpp"
#include "specml/tensor.hpp"

namespace specml {

/// Encoder-Process-Decoder: one convolution in, residual blocks of dilated
/// convolutions with ReLU between them, one convolution out. `blocks` lists
/// the dilation rates of the convolutions inside each residual block.
struct EpdConfig {
    int dims = 1;
    int input_channels = 1;
    int output_channels = 1;
    int width = 128;
    int encoder_kernel = 5;
    int process_kernel = 3;
    int decoder_kernel = 5;
    std::vector<std::vector<int>> blocks;
};

/// Three residual blocks, dilation rates (1,1,1), width 128.
EpdConfig epd_config_1d(int input_channels = 1, int output_channels = 1,
                        int width = 128);

/// Two residual blocks, dilation rates (1,2) or (1,2,4,2,1), width 64.
EpdConfig epd_config_2d(int input_channels, int output_channels,
                        int width = 64, bool long_dilations = false);

/// Weight layout: 1D (k, cin, cout) stored as tensor (nx=k, ny=cin, c=cout);
/// 2D (k, k, cin, cout) stored as (nx=k, ny=k, c=cin*cout) with channel
/// index ci*cout + co. Bias (cout).
struct ConvParams {
    Tensor weight;
    Tensor bias;
    int dilation = 1;
};

struct EpdParams {
    ConvParams encoder;
    std::vector<std::vector<ConvParams>> blocks;
    ConvParams decoder;
};

/// Biases zero; weights truncated normal, stddev 1/sqrt(fan_in), cut at 2.
EpdParams init_epd_params(const EpdConfig& cfg, Rng& rng);

int64_t epd_param_count(const EpdConfig& cfg);

/// Flat parameter views in a stable order matching epd_param_names.
std::vector<Tensor*> epd_param_tensors(EpdParams& params);
std::vector<const Tensor*> epd_param_tensors(const EpdParams& params);
std::vector<std::string> epd_param_names(const EpdConfig& cfg);

/// Parameters lifted onto a tape as leaves (same order as the flat views).
struct EpdVars {
    std::vector<Var> vars;
};
EpdVars epd_lift(Tape& tape, const EpdParams& params);

/// Forward pass on the tape; input (spatial..., input_channels).
Var epd_forward(Tape& tape, const EpdConfig& cfg, const EpdVars& vars,
                Var input);

/// Eager forward without gradients.
Tensor epd_apply(const EpdConfig& cfg, const EpdParams& params,
                 const Tensor& input);

}  // namespace specml
