#include "tvc/bundle.hpp"

#include <cmath>

namespace tvc {

int BundleConfig::patch_side() const {
    const int side = int(std::lround(std::sqrt(double(n_tokens))));
    return side;
}

void BundleConfig::validate() const {
    require(n_tokens >= 1, Err::ShapeMismatch, "N must be >= 1");
    const int side = patch_side();
    require(side * side == n_tokens, Err::ShapeMismatch, "N must be a perfect square");
    require(dim >= 1 && heads >= 1 && dim % heads == 0, Err::ShapeMismatch,
            "D must be a positive multiple of M");
    require(codes >= 2, Err::ShapeMismatch, "K must be >= 2");
    require(factor >= 1 && segment >= 1 && depth >= 0, Err::ShapeMismatch, "bad geometry");
}

namespace {

void push_mat(std::vector<TensorRef>& out, const std::string& name, Mat& m) {
    out.push_back({name, {m.rows, m.cols}, m.a.data(), m.a.size()});
}

void push_vec(std::vector<TensorRef>& out, const std::string& name, std::vector<double>& v) {
    out.push_back({name, {int(v.size())}, v.data(), v.size()});
}

}  // namespace

std::vector<TensorRef> tensor_refs(AutoencoderParams& p, const std::string& prefix) {
    std::vector<TensorRef> out;
    push_mat(out, prefix + ".enc.embed_w", p.enc.embed_w);
    push_vec(out, prefix + ".enc.embed_b", p.enc.embed_b);
    for (size_t j = 0; j < p.enc.layers.size(); ++j) {
        const std::string lp = prefix + ".enc.layer" + std::to_string(j);
        push_mat(out, lp + ".w", p.enc.layers[j].w);
        push_vec(out, lp + ".b", p.enc.layers[j].b);
        push_mat(out, lp + ".mix", p.enc.layers[j].mix);
    }
    for (size_t j = 0; j < p.dec.layers.size(); ++j) {
        const std::string lp = prefix + ".dec.layer" + std::to_string(j);
        push_mat(out, lp + ".w", p.dec.layers[j].w);
        push_vec(out, lp + ".b", p.dec.layers[j].b);
        push_mat(out, lp + ".mix", p.dec.layers[j].mix);
    }
    push_mat(out, prefix + ".dec.out_w", p.dec.out_w);
    push_vec(out, prefix + ".dec.out_b", p.dec.out_b);
    return out;
}

std::vector<TensorRef> tensor_refs(MultiHeadCodebook& book, const std::string& prefix) {
    std::vector<TensorRef> out;
    out.push_back({prefix + ".codes",
                   {book.heads, book.codes_per_head, book.sub_dim},
                   book.codes.data(),
                   book.codes.size()});
    return out;
}

std::vector<TensorRef> tensor_refs(TokenizerBundle& b) {
    std::vector<TensorRef> out;
    for (auto& r : tensor_refs(b.visual, "vis")) out.push_back(r);
    for (auto& r : tensor_refs(b.temporal, "temp")) out.push_back(r);
    for (auto& r : tensor_refs(b.book, "book")) out.push_back(r);
    return out;
}

}  // namespace tvc
