#pragma once

#include <cstdint>
#include <vector>

#include "tvc/mat.hpp"
#include "tvc/types.hpp"

namespace tvc {

// One hidden layer: per-token affine (D -> D), tanh, then a learned N x N
// token-mixing matrix applied residually: H' = H + mix * tanh(H w + b).
struct LayerParams {
    Mat w;                  // D x D
    std::vector<double> b;  // D
    Mat mix;                // N x N
};

struct EncoderParams {
    // fixed input map applied before the affine embedding: x' = (x + in_shift) * in_scale.
    // Centers and rescales pixel-unit tokens so both modality clouds share the
    // embedding scale; identity for temporal tokens.
    double in_shift = 0.0;
    double in_scale = 1.0;
    Mat embed_w;                     // P x D
    std::vector<double> embed_b;     // D
    std::vector<LayerParams> layers;
};

struct DecoderParams {
    std::vector<LayerParams> layers;
    Mat out_w;                    // D x P
    std::vector<double> out_b;    // P
    // fixed output map, the inverse of the encoder's input map
    double out_scale = 1.0;
    double out_shift = 0.0;
};

struct AutoencoderParams {
    EncoderParams enc;
    DecoderParams dec;
};

struct StackTape {
    Mat input;              // what the stack consumed (N x P for encode, N x D for decode)
    std::vector<Mat> pre;   // H_j before each layer
    std::vector<Mat> act;   // tanh activations per layer
    Mat top;                // hidden state after the last layer
};

// tokens: N x P -> embedding: N x D. Pure function of (tokens, params).
Mat encode(const Mat& tokens, const EncoderParams& p, StackTape* tape = nullptr);

// quantized embedding: N x D -> tokens: N x P. No clamping here; visual
// outputs are clamped at unpatchify time so gradients keep the raw value.
Mat decode(const Mat& q, const DecoderParams& p, StackTape* tape = nullptr);

// Accumulate parameter gradients for d_loss/d_output; optionally return
// d_loss/d_input. Gradient buffers must be shaped like the params.
void encode_backward(const EncoderParams& p, const StackTape& tape, const Mat& d_out,
                     EncoderParams& grad, Mat* d_tokens = nullptr);
void decode_backward(const DecoderParams& p, const StackTape& tape, const Mat& d_out,
                     DecoderParams& grad, Mat* d_q = nullptr);

// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
AutoencoderParams init_autoencoder(int n_tokens, int token_dim, int embed_dim, int depth,
                                   uint64_t seed);

AutoencoderParams zeros_like(const AutoencoderParams& p);

// Identity wiring (depth 0, unit embedding) requires token_dim == embed_dim.
AutoencoderParams identity_autoencoder(int n_tokens, int dim);

}  // namespace tvc
