#pragma once

#include <cstdint>
#include <vector>

#include "tvc/mat.hpp"

namespace tvc {

// M independent codebooks of K codes, each code a D/M sub-vector. Shared
// between the visual and temporal encoders.
struct MultiHeadCodebook {
    int heads = 0;          // M
    int codes_per_head = 0; // K
    int sub_dim = 0;        // D / M
    std::vector<double> codes;  // [m][k][d], contiguous

    MultiHeadCodebook() = default;
    MultiHeadCodebook(int m, int k, int d)
        : heads(m), codes_per_head(k), sub_dim(d), codes(size_t(m) * k * d, 0.0) {}

    double& at(int m, int k, int d) { return codes[(size_t(m) * codes_per_head + k) * sub_dim + d]; }
    double at(int m, int k, int d) const { return codes[(size_t(m) * codes_per_head + k) * sub_dim + d]; }

    int dim() const { return heads * sub_dim; }
};

// N x M grid of selected code indices.
struct IndexSequence {
    int tokens = 0, heads = 0;
    std::vector<int32_t> idx;

    IndexSequence() = default;
    IndexSequence(int n, int m) : tokens(n), heads(m), idx(size_t(n) * m, 0) {}

    int32_t& at(int i, int m) { return idx[size_t(i) * heads + m]; }
    int32_t at(int i, int m) const { return idx[size_t(i) * heads + m]; }

    bool operator==(const IndexSequence& o) const {
        return tokens == o.tokens && heads == o.heads && idx == o.idx;
    }
};

struct QuantizeResult {
    Mat quantized;          // N x D, concatenated selected codes
    IndexSequence indices;  // N x M
    double residual_sq = 0; // sum over tokens/heads of |e - q|^2
};

// Per-token, per-head nearest neighbor in L2; ties broken by smallest code
// index. The training backward copies dL/dq into dL/de (straight-through).
QuantizeResult quantize(const Mat& embedding, const MultiHeadCodebook& book);

// q[i, m] = codes[m][indices[i, m]]; exact inverse of the index extraction.
Mat lookup(const IndexSequence& indices, const MultiHeadCodebook& book);

// (quant, commit) = (|sg[e]-q|^2, |sg[q]-e|^2). Both equal residual_sq in
// value; they differ only in which parameters their gradients reach.
std::pair<double, double> codebook_losses(const Mat& embedding, const QuantizeResult& result);

// Fraction of each head's K codes selected at least once across the history.
std::vector<double> utilization(const std::vector<IndexSequence>& history,
                                const MultiHeadCodebook& book);

// k-means++ seeding (no Lloyd iterations) per head over the sample's
// sub-vectors. Requires at least K distinct sub-vectors per head.
MultiHeadCodebook init_codebooks(const Mat& sample_embeddings, int heads, int codes_per_head,
                                 uint64_t seed);

}  // namespace tvc
