#pragma once

#include <string>
#include <vector>

#include "tvc/autoencoder.hpp"
#include "tvc/quantizer.hpp"

namespace tvc {

// Shared geometry of the dual tokenizer. Images are square grayscale rasters
// of factor * sqrt(N) pixels; series are N * segment values long.
struct BundleConfig {
    int n_tokens = 16;  // N
    int dim = 16;       // D
    int heads = 4;      // M
    int codes = 16;     // K
    int factor = 4;     // f
    int segment = 4;    // l
    int depth = 2;

    int patch_side() const;      // sqrt(N), patches per image edge
    int image_height() const { return factor * patch_side(); }
    int image_width() const { return factor * patch_side(); }
    int image_channels() const { return 1; }
    int series_length() const { return n_tokens * segment; }
    int visual_token_dim() const { return factor * factor * image_channels(); }
    int temporal_token_dim() const { return segment; }

    void validate() const;
};

struct TokenizerBundle {
    BundleConfig cfg;
    AutoencoderParams visual;
    AutoencoderParams temporal;
    MultiHeadCodebook book;
    bool frozen = false;
};

// Pixel-unit tokens are mapped to [-2, 2] before the visual embedding so the
// two modality clouds share the embedding scale; the decoder applies the
// inverse map. Exact binary constants keep checkpoints reproducible.
constexpr double kVisualInShift = -0.5;
constexpr double kVisualInScale = 4.0;

inline void set_pixel_map(AutoencoderParams& p, double in_shift, double in_scale) {
    p.enc.in_shift = in_shift;
    p.enc.in_scale = in_scale;
    p.dec.out_scale = 1.0 / in_scale;
    p.dec.out_shift = -in_shift;
}

// Named view into a parameter tensor; powers SGD updates, finite-difference
// sweeps, serialization and digests with one traversal order.
struct TensorRef {
    std::string name;
    std::vector<int> shape;
    double* data = nullptr;
    size_t size = 0;
};

std::vector<TensorRef> tensor_refs(AutoencoderParams& p, const std::string& prefix);
std::vector<TensorRef> tensor_refs(MultiHeadCodebook& book, const std::string& prefix);
std::vector<TensorRef> tensor_refs(TokenizerBundle& b);

}  // namespace tvc
