#pragma once

#include <cstdint>
#include <vector>

#include "tvc/bundle.hpp"
#include "tvc/types.hpp"

namespace tvc {

// Per-batch loss terms; each is a per-sample sum of squares averaged over the
// batch, so total = recon + quant + commit with unit commitment weight.
struct LossBreakdown {
    double recon = 0.0;
    double quant = 0.0;
    double commit = 0.0;
    double total = 0.0;
    Modality modality = Modality::Visual;
};

struct WarmupGrads {
    AutoencoderParams ae;    // gradients for the batch modality's autoencoder
    MultiHeadCodebook book;  // gradients for the shared codebook
    Modality modality = Modality::Visual;
};

// Forward-pass values captured per sample so the finite-difference companion
// objective can hold the stop-gradient terms and code assignment fixed.
struct SampleCapture {
    Mat embedding;   // e at the base point
    Mat quantized;   // q at the base point
    IndexSequence indices;
};

// Eq.-style objective for one unimodal batch: reconstruction + quantization +
// commitment, with straight-through routing in the backward pass.
LossBreakdown compute_losses(const std::vector<TokenSequence>& batch, const TokenizerBundle& bundle,
                             WarmupGrads* grads = nullptr,
                             std::vector<SampleCapture>* captures = nullptr);

// The objective whose exact gradient the straight-through backward computes:
// quantization is replaced by adding the frozen offset q0 - e0, and the
// stop-gradient operands keep their base-point values. Finite differences of
// this function validate compute_losses gradients.
double frozen_surrogate_loss(const std::vector<TokenSequence>& batch,
                             const TokenizerBundle& bundle,
                             const std::vector<SampleCapture>& captures);

struct WarmupConfig {
    double learning_rate = 3e-3;
    int steps = 2000;
    int batch_size = 8;
    uint64_t seed = 42;
    double momentum = 0.0;  // 0 = plain SGD
};

struct OptState {
    AutoencoderParams vis_vel;
    AutoencoderParams temp_vel;
    MultiHeadCodebook book_vel;
    bool ready = false;
};

// One SGD (or momentum) update on the batch modality's autoencoder and the
// shared codebook. Deterministic; refuses frozen bundles.
LossBreakdown warmup_step(const std::vector<TokenSequence>& batch, TokenizerBundle& bundle,
                          OptState& opt, const WarmupConfig& cfg,
                          std::vector<SampleCapture>* captures = nullptr);

struct WarmupResult {
    TokenizerBundle bundle;  // frozen
    std::vector<LossBreakdown> curve;
    std::vector<double> tail_utilization;  // per head, over the final 100 steps
};

// Alternating unimodal batches (even steps visual, odd temporal) with seeded
// shuffling; codebook seeded by k-means++ over initial embeddings of both
// corpora; returns the frozen bundle plus the per-step loss log.
WarmupResult run_warmup(const std::vector<TimeSeries>& series_corpus,
                        const std::vector<Image>& image_corpus, const BundleConfig& cfg,
                        const WarmupConfig& warm);

}  // namespace tvc
