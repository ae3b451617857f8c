#include "tvc/autoencoder.hpp"

#include <cmath>

#include "tvc/rng.hpp"

namespace tvc {

namespace {

// H' = H + mix * tanh(H w + b) for each layer, taping intermediates.
Mat run_stack(const Mat& input, const std::vector<LayerParams>& layers, StackTape* tape) {
    Mat h = input;
    if (tape) {
        tape->input = input;
        tape->pre.clear();
        tape->act.clear();
    }
    for (const auto& layer : layers) {
        require(layer.w.rows == h.cols && layer.w.cols == h.cols, Err::ShapeMismatch,
                "layer weight shape");
        require(layer.mix.rows == h.rows && layer.mix.cols == h.rows, Err::ShapeMismatch,
                "mixing matrix shape");
        Mat z = matmul(h, layer.w);
        for (int i = 0; i < z.rows; ++i)
            for (int j = 0; j < z.cols; ++j) z(i, j) = std::tanh(z(i, j) + layer.b[size_t(j)]);
        if (tape) {
            tape->pre.push_back(h);
            tape->act.push_back(z);
        }
        Mat mixed = matmul(layer.mix, z);
        add_inplace(h, mixed);
    }
    if (tape) tape->top = h;
    return h;
}

// Backward through the residual mixing stack; d_h is dL/d(stack output) on
// entry and dL/d(stack input) on return.
void stack_backward(const std::vector<LayerParams>& layers, const StackTape& tape, Mat& d_h,
                    std::vector<LayerParams>& grads) {
    for (int j = int(layers.size()) - 1; j >= 0; --j) {
        const auto& layer = layers[size_t(j)];
        auto& grad = grads[size_t(j)];
        const Mat& h_in = tape.pre[size_t(j)];
        const Mat& act = tape.act[size_t(j)];

        add_inplace(grad.mix, matmul_nt(d_h, act));
        Mat d_act = matmul_tn(layer.mix, d_h);
        for (int r = 0; r < d_act.rows; ++r)
            for (int c = 0; c < d_act.cols; ++c)
                d_act(r, c) *= 1.0 - act(r, c) * act(r, c);

        add_inplace(grad.w, matmul_tn(h_in, d_act));
        for (int r = 0; r < d_act.rows; ++r)
            for (int c = 0; c < d_act.cols; ++c) grad.b[size_t(c)] += d_act(r, c);

        add_inplace(d_h, matmul_nt(d_act, layer.w));
    }
}

void init_uniform(Mat& m, int fan_in, Rng& rng) {
    const double s = 1.0 / std::sqrt(double(fan_in));
    for (double& v : m.a) v = rng.uniform(-s, s);
}

}  // namespace

Mat encode(const Mat& tokens, const EncoderParams& p, StackTape* tape) {
    require(tokens.cols == p.embed_w.rows, Err::ShapeMismatch, "token width vs embed weight");
    Mat scaled = tokens;
    if (p.in_shift != 0.0 || p.in_scale != 1.0)
        for (double& v : scaled.a) v = (v + p.in_shift) * p.in_scale;
    Mat h = matmul(scaled, p.embed_w);
    for (int i = 0; i < h.rows; ++i)
        for (int j = 0; j < h.cols; ++j) h(i, j) += p.embed_b[size_t(j)];
    Mat out = run_stack(h, p.layers, tape);
    if (tape) tape->input = std::move(scaled);  // backward needs the embedded-layer input
    return out;
}

void encode_backward(const EncoderParams& p, const StackTape& tape, const Mat& d_out,
                     EncoderParams& grad, Mat* d_tokens) {
    Mat d_h = d_out;
    std::vector<LayerParams>& layer_grads = grad.layers;
    stack_backward(p.layers, tape, d_h, layer_grads);
    // embedding affine: H0 = X * We + be
    add_inplace(grad.embed_w, matmul_tn(tape.input, d_h));
    for (int r = 0; r < d_h.rows; ++r)
        for (int c = 0; c < d_h.cols; ++c) grad.embed_b[size_t(c)] += d_h(r, c);
    if (d_tokens) {
        *d_tokens = matmul_nt(d_h, p.embed_w);
        if (p.in_scale != 1.0)
            for (double& v : d_tokens->a) v *= p.in_scale;
    }
}

Mat decode(const Mat& q, const DecoderParams& p, StackTape* tape) {
    Mat h = run_stack(q, p.layers, tape);
    require(h.cols == p.out_w.rows, Err::ShapeMismatch, "hidden width vs output weight");
    Mat y = matmul(h, p.out_w);
    for (int i = 0; i < y.rows; ++i)
        for (int j = 0; j < y.cols; ++j)
            y(i, j) = (y(i, j) + p.out_b[size_t(j)]) * p.out_scale + p.out_shift;
    return y;
}

void decode_backward(const DecoderParams& p, const StackTape& tape, const Mat& d_out,
                     DecoderParams& grad, Mat* d_q) {
    Mat d_raw = d_out;
    if (p.out_scale != 1.0)
        for (double& v : d_raw.a) v *= p.out_scale;
    add_inplace(grad.out_w, matmul_tn(tape.top, d_raw));
    for (int r = 0; r < d_raw.rows; ++r)
        for (int c = 0; c < d_raw.cols; ++c) grad.out_b[size_t(c)] += d_raw(r, c);
    Mat d_h = matmul_nt(d_raw, p.out_w);
    stack_backward(p.layers, tape, d_h, grad.layers);
    if (d_q) *d_q = d_h;
}

AutoencoderParams init_autoencoder(int n_tokens, int token_dim, int embed_dim, int depth,
                                   uint64_t seed) {
    require(n_tokens >= 1 && token_dim >= 1 && embed_dim >= 1 && depth >= 0, Err::ShapeMismatch,
            "bad autoencoder config");
    Rng rng(seed);
    AutoencoderParams p;
    p.enc.embed_w = Mat(token_dim, embed_dim);
    init_uniform(p.enc.embed_w, token_dim, rng);
    p.enc.embed_b.assign(size_t(embed_dim), 0.0);
    for (int j = 0; j < depth; ++j) {
        LayerParams layer;
        layer.w = Mat(embed_dim, embed_dim);
        init_uniform(layer.w, embed_dim, rng);
        layer.b.assign(size_t(embed_dim), 0.0);
        layer.mix = Mat(n_tokens, n_tokens);
        init_uniform(layer.mix, n_tokens, rng);
        p.enc.layers.push_back(std::move(layer));
    }
    for (int j = 0; j < depth; ++j) {
        LayerParams layer;
        layer.w = Mat(embed_dim, embed_dim);
        init_uniform(layer.w, embed_dim, rng);
        layer.b.assign(size_t(embed_dim), 0.0);
        layer.mix = Mat(n_tokens, n_tokens);
        init_uniform(layer.mix, n_tokens, rng);
        p.dec.layers.push_back(std::move(layer));
    }
    p.dec.out_w = Mat(embed_dim, token_dim);
    init_uniform(p.dec.out_w, embed_dim, rng);
    p.dec.out_b.assign(size_t(token_dim), 0.0);
    return p;
}

AutoencoderParams zeros_like(const AutoencoderParams& p) {
    AutoencoderParams g;
    g.enc.embed_w = Mat(p.enc.embed_w.rows, p.enc.embed_w.cols);
    g.enc.embed_b.assign(p.enc.embed_b.size(), 0.0);
    for (const auto& layer : p.enc.layers) {
        LayerParams z;
        z.w = Mat(layer.w.rows, layer.w.cols);
        z.b.assign(layer.b.size(), 0.0);
        z.mix = Mat(layer.mix.rows, layer.mix.cols);
        g.enc.layers.push_back(std::move(z));
    }
    for (const auto& layer : p.dec.layers) {
        LayerParams z;
        z.w = Mat(layer.w.rows, layer.w.cols);
        z.b.assign(layer.b.size(), 0.0);
        z.mix = Mat(layer.mix.rows, layer.mix.cols);
        g.dec.layers.push_back(std::move(z));
    }
    g.dec.out_w = Mat(p.dec.out_w.rows, p.dec.out_w.cols);
    g.dec.out_b.assign(p.dec.out_b.size(), 0.0);
    return g;
}

AutoencoderParams identity_autoencoder(int n_tokens, int dim) {
    (void)n_tokens;
    AutoencoderParams p;
    p.enc.embed_w = Mat(dim, dim);
    for (int i = 0; i < dim; ++i) p.enc.embed_w(i, i) = 1.0;
    p.enc.embed_b.assign(size_t(dim), 0.0);
    p.dec.out_w = Mat(dim, dim);
    for (int i = 0; i < dim; ++i) p.dec.out_w(i, i) = 1.0;
    p.dec.out_b.assign(size_t(dim), 0.0);
    return p;
}

}  // namespace tvc
