#pragma once

#include "tvc/types.hpp"

namespace tvc {

// Non-overlapping f x f x C patches, row-major patch order, each flattened
// row-major. Lossless: unpatchify_image inverts exactly.
TokenSequence patchify_image(const Image& img, int factor);

// Inverse of patchify_image; pixels clamped to [0,1] so decoder outputs are
// always a valid raster.
Image unpatchify_image(const TokenSequence& tokens);

enum class SegmentMode { Strict, Lenient };

// Strict: segment length must divide the series length. Lenient: the series
// is left-padded by repeating the first value up to the next multiple, and
// the pad length is recorded so assemble_series can strip it.
TokenSequence segment_series(const TimeSeries& x, int segment, SegmentMode mode = SegmentMode::Strict);

TimeSeries assemble_series(const TokenSequence& tokens);

// Population-std standardization. std < 1e-8 is replaced by 1 so constant
// series only lose their mean. Stats are stored for exact inversion.
TimeSeries instance_normalize(const TimeSeries& x);

TimeSeries denormalize(const TimeSeries& x);
TimeSeries denormalize(const std::vector<double>& values, const NormStats& stats);

NormStats compute_norm_stats(const std::vector<double>& values);

}  // namespace tvc
