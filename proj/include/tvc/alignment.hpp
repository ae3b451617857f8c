#pragma once

#include <cstdint>
#include <vector>

#include "tvc/bundle.hpp"
#include "tvc/types.hpp"

namespace tvc {

enum class Direction { TemporalToVisual, VisualToTemporal };

// Index-to-index map over the frozen bundle: summed per-head code embeddings
// plus learned positions feed one single-head self-attention block, then a
// per-head linear projection emits K logits per position.
struct AlignmentModel {
    Direction direction = Direction::TemporalToVisual;
    int n_tokens = 0, heads = 0, codes = 0, embed_dim = 0;  // N, M, K, E

    std::vector<Mat> code_embed;           // M tables, K x E
    Mat pos;                               // N x E
    Mat wq, wk, wv, wo;                    // E x E
    std::vector<Mat> out_w;                // M tables, E x K
    std::vector<std::vector<double>> out_b;  // M x K
};

struct AlignPrediction {
    std::vector<Mat> logits;  // per head, N x K
    IndexSequence argmax;     // ties resolved to the smallest index
};

AlignmentModel init_alignment(int n_tokens, int heads, int codes, int embed_dim,
                              Direction direction, uint64_t seed);

AlignmentModel zeros_alignment(int n_tokens, int heads, int codes, int embed_dim,
                               Direction direction);

std::vector<TensorRef> tensor_refs(AlignmentModel& m);

// Deterministic forward pass; source indices must be in range.
AlignPrediction align_predict(const AlignmentModel& model, const IndexSequence& src);

// Indices selected by the frozen bundle for an input sample:
// quantize(encode(tokenize(x))).indices.
IndexSequence extract_indices(const TimeSeries& x, const TokenizerBundle& bundle);
IndexSequence extract_indices(const Image& img, const TokenizerBundle& bundle);

enum class PairProvenance { SlidingWindow, ClassAssigned };

struct PairedSample {
    IndexSequence source;
    IndexSequence target;
    PairProvenance provenance = PairProvenance::SlidingWindow;
    int label = -1;  // class id for class-assigned pairs
};

struct AlignTrainConfig {
    double learning_rate = 0.05;
    int steps = 2000;
    int batch_size = 8;
    int embed_dim = 16;  // E
    uint64_t seed = 7;
};

struct AlignTrainResult {
    AlignmentModel model;
    std::vector<double> loss_curve;  // mean per-position, per-head cross-entropy (nats)
};

// Seeded SGD on mean cross-entropy between predicted logits and target
// indices. The bundle stays untouched; it only fixes (N, M, K).
AlignTrainResult train_alignment(const std::vector<PairedSample>& pairs,
                                 const TokenizerBundle& bundle, Direction direction,
                                 const AlignTrainConfig& cfg);

// Mean cross-entropy of the model on a pair set (evaluation helper).
double alignment_cross_entropy(const AlignmentModel& model, const std::vector<PairedSample>& pairs);

// Loss and parameter gradients for a single pair; grad must be zero-shaped
// like the model. Returns the mean per-position, per-head cross-entropy.
double alignment_pair_gradients(const AlignmentModel& model, const IndexSequence& src,
                                const IndexSequence& target, AlignmentModel& grad);

// Synchronized crops: the k-th pair couples series[k*stride, k*stride+window)
// with the full-height image crop whose horizontal offset is proportional to
// the series offset. window must equal the bundle's series length.
std::vector<PairedSample> build_sliding_pairs(const TimeSeries& series, const Image& image,
                                              int window, int stride,
                                              const TokenizerBundle& bundle);

}  // namespace tvc
