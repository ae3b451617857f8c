#pragma once

#include <cstdint>
#include <string>

#include "tvc/alignment.hpp"
#include "tvc/bundle.hpp"
#include "tvc/convert.hpp"
#include "tvc/tokenize.hpp"
#include "tvc/training.hpp"

namespace tvc {

// Flat key=value run configuration. Unknown keys are rejected; constraints of
// the downstream modules are validated at parse time.
struct RunConfig {
    uint64_t seed = 42;
    int n_tokens = 16;      // N
    int dim = 16;           // D
    int heads = 4;          // M
    int codes = 16;         // K
    int factor = 4;         // f
    int segment = 4;        // l
    int depth = 2;
    int embed_dim = 16;     // E
    double learning_rate = 3e-3;
    int steps = 2000;
    int batch_size = 8;
    int context_length = 64;
    int horizon = 128;
    int w_obs = 16;
    int w_out = 48;
    SegmentMode mode = SegmentMode::Strict;

    BundleConfig bundle_config() const;
    WarmupConfig warmup_config() const;
    AlignTrainConfig align_config() const;
    ForecastConfig forecast_config() const;

    void validate() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);
std::string format_config(const RunConfig& cfg);

}  // namespace tvc
