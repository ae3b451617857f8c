#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tvc/alignment.hpp"
#include "tvc/bundle.hpp"
#include "tvc/types.hpp"

namespace tvc {

// Numeric CSV, rows = timesteps, columns = channels. A first row whose cells
// all fail to parse is treated as a header and skipped. column = -1 loads
// every column as an independent series.
std::vector<TimeSeries> load_series_csv(const std::string& path, int column = -1);

void save_series_csv(const std::vector<TimeSeries>& series, const std::string& path);

// Binary PGM (P5) for single-channel, PPM (P6) for three-channel, maxval 255.
Image load_image(const std::string& path);
void save_image(const Image& img, const std::string& path);

// Checkpoint container: "TART" magic, u32 version, named float64 sections,
// trailing CRC32. Round trips are bit-exact.
struct Section {
    std::string name;
    std::vector<int> shape;
    std::vector<double> data;
};

std::vector<unsigned char> encode_checkpoint(const std::vector<Section>& sections);
std::vector<Section> decode_checkpoint(const std::vector<unsigned char>& bytes);

void write_checkpoint_file(const std::vector<Section>& sections, const std::string& path);
std::vector<Section> read_checkpoint_file(const std::string& path);

void save_bundle(const TokenizerBundle& bundle, const std::string& path);
TokenizerBundle load_bundle(const std::string& path);

void save_alignment(const AlignmentModel& model, const std::string& path);
AlignmentModel load_alignment(const std::string& path);

// CRC32 (IEEE, reflected polynomial 0xEDB88320).
uint32_t crc32(const unsigned char* data, size_t len);

// CRC32 of the serialized bundle; lets tests verify frozen-bundle integrity.
uint32_t bundle_digest(const TokenizerBundle& bundle);

// Atomic text write: temp file then rename.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace tvc
