#include "specml/epd.hpp"

#include <stdexcept>

namespace specml {

EpdConfig epd_config_1d(int input_channels, int output_channels, int width) {
    EpdConfig cfg;
    cfg.dims = 1;
    cfg.input_channels = input_channels;
    cfg.output_channels = output_channels;
    cfg.width = width;
    cfg.blocks = {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}};
    return cfg;
}

EpdConfig epd_config_2d(int input_channels, int output_channels, int width,
                        bool long_dilations) {
    EpdConfig cfg;
    cfg.dims = 2;
    cfg.input_channels = input_channels;
    cfg.output_channels = output_channels;
    cfg.width = width;
    std::vector<int> rates =
        long_dilations ? std::vector<int>{1, 2, 4, 2, 1} : std::vector<int>{1, 2};
    cfg.blocks = {rates, rates};
    return cfg;
}

namespace {

Tensor weight_tensor(int dims, int k, int cin, int cout) {
    return dims == 1 ? Tensor(2, k, cin, cout) : Tensor(2, k, k, cin * cout);
}

ConvParams init_conv(int dims, int k, int cin, int cout, int dilation,
                     Rng& rng) {
    ConvParams p;
    p.weight = weight_tensor(dims, k, cin, cout);
    p.bias = Tensor(1, 1, 1, cout);
    p.dilation = dilation;
    int fan_in = cin * (dims == 1 ? k : k * k);
    double stddev = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& w : p.weight.data) w = rng.truncated_normal(stddev);
    return p;
}

void validate(const EpdConfig& cfg) {
    if (cfg.width < 1 || cfg.input_channels < 1 || cfg.output_channels < 1)
        throw std::invalid_argument("epd: channel counts must be positive");
    if (cfg.blocks.empty())
        throw std::invalid_argument("epd: at least one residual block");
    for (const auto& b : cfg.blocks)
        if (b.empty()) throw std::invalid_argument("epd: empty block");
}

}  // namespace

EpdParams init_epd_params(const EpdConfig& cfg, Rng& rng) {
    validate(cfg);
    EpdParams p;
    p.encoder = init_conv(cfg.dims, cfg.encoder_kernel, cfg.input_channels,
                          cfg.width, 1, rng);
    for (const auto& rates : cfg.blocks) {
        std::vector<ConvParams> block;
        for (int d : rates)
            block.push_back(
                init_conv(cfg.dims, cfg.process_kernel, cfg.width, cfg.width, d,
                          rng));
        p.blocks.push_back(std::move(block));
    }
    p.decoder = init_conv(cfg.dims, cfg.decoder_kernel, cfg.width,
                          cfg.output_channels, 1, rng);
    return p;
}

int64_t epd_param_count(const EpdConfig& cfg) {
    validate(cfg);
    auto conv_count = [&](int k, int cin, int cout) {
        int64_t taps = cfg.dims == 1 ? k : k * k;
        return taps * cin * cout + cout;
    };
    int64_t n = conv_count(cfg.encoder_kernel, cfg.input_channels, cfg.width);
    for (const auto& rates : cfg.blocks)
        n += static_cast<int64_t>(rates.size()) *
             conv_count(cfg.process_kernel, cfg.width, cfg.width);
    n += conv_count(cfg.decoder_kernel, cfg.width, cfg.output_channels);
    return n;
}

std::vector<Tensor*> epd_param_tensors(EpdParams& params) {
    std::vector<Tensor*> out{&params.encoder.weight, &params.encoder.bias};
    for (auto& block : params.blocks)
        for (auto& conv : block) {
            out.push_back(&conv.weight);
            out.push_back(&conv.bias);
        }
    out.push_back(&params.decoder.weight);
    out.push_back(&params.decoder.bias);
    return out;
}

std::vector<const Tensor*> epd_param_tensors(const EpdParams& params) {
    auto mutable_view = epd_param_tensors(const_cast<EpdParams&>(params));
    return {mutable_view.begin(), mutable_view.end()};
}

std::vector<std::string> epd_param_names(const EpdConfig& cfg) {
    std::vector<std::string> names{"encoder.weight", "encoder.bias"};
    for (size_t b = 0; b < cfg.blocks.size(); ++b)
        for (size_t c = 0; c < cfg.blocks[b].size(); ++c) {
            std::string base =
                "block" + std::to_string(b) + ".conv" + std::to_string(c);
            names.push_back(base + ".weight");
            names.push_back(base + ".bias");
        }
    names.push_back("decoder.weight");
    names.push_back("decoder.bias");
    return names;
}

EpdVars epd_lift(Tape& tape, const EpdParams& params) {
    EpdVars vars;
    for (const Tensor* t : epd_param_tensors(params))
        vars.vars.push_back(tape.leaf(*t));
    return vars;
}

Var epd_forward(Tape& tape, const EpdConfig& cfg, const EpdVars& vars,
                Var input) {
    validate(cfg);
    size_t expected = 2;
    for (const auto& b : cfg.blocks) expected += 2 * b.size();
    expected += 2;
    if (vars.vars.size() != expected)
        throw std::invalid_argument("epd_forward: parameter count mismatch");
    if (tape.value(input).channels != cfg.input_channels)
        throw std::invalid_argument("epd_forward: input channel mismatch");

    size_t i = 0;
    auto next = [&]() {
        Var w = vars.vars[i], b = vars.vars[i + 1];
        i += 2;
        return std::pair<Var, Var>(w, b);
    };

    auto [ew, eb] = next();
    Var x = tape.conv(input, ew, eb, 1);
    for (const auto& rates : cfg.blocks) {
        Var y = x;
        for (size_t c = 0; c < rates.size(); ++c) {
            if (c > 0) y = tape.relu(y);
            auto [w, b] = next();
            y = tape.conv(y, w, b, rates[c]);
        }
        x = tape.add(x, y);
    }
    auto [dw, db] = next();
    return tape.conv(x, dw, db, 1);
}

Tensor epd_apply(const EpdConfig& cfg, const EpdParams& params,
                 const Tensor& input) {
    Tape tape;
    EpdVars vars = epd_lift(tape, params);
    Var out = epd_forward(tape, cfg, vars, tape.leaf(input));
    return tape.value(out);
}

}  // namespace specml
