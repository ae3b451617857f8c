#pragma once

#include <cstdint>
#include <vector>

#include "tvc/types.hpp"

namespace tvc {

// Oriented sinusoidal stripe rasters. Class k fixes the stripe orientation
// and spatial period; phase, contrast and brightness vary per sample.
// Orientations cycle vertical / horizontal / diagonal; periods 8, 16, 32 px.
std::vector<Image> make_stripe_images(int count, int height, int width, int classes,
                                      uint64_t seed, std::vector<int>* labels = nullptr);

// Sums of 1-3 sinusoids plus a linear trend and light noise. Class k fixes
// the base period (8, 16, 32 samples); amplitudes, phases, harmonic mix and
// trend slope vary per sample.
std::vector<TimeSeries> make_sine_series(int count, int length, int classes, uint64_t seed,
                                         std::vector<int>* labels = nullptr);

// Standard desk corpora shared by the CLI and the test suites: 256 samples
// per modality for training, 3 classes, seeds derived from the run seed so
// the same configuration always yields the same data.
std::vector<Image> desk_train_images(int height, int width, uint64_t seed,
                                     std::vector<int>* labels = nullptr);
std::vector<TimeSeries> desk_train_series(int length, uint64_t seed,
                                          std::vector<int>* labels = nullptr);
std::vector<Image> desk_heldout_images(int height, int width, uint64_t seed, int count,
                                       std::vector<int>* labels = nullptr);
std::vector<TimeSeries> desk_heldout_series(int length, uint64_t seed, int count,
                                            std::vector<int>* labels = nullptr);

}  // namespace tvc
