// mnist.hpp
// MNIST ingestion: IDX container parsing, 0/1 label filtering, 28x28 -> 16x16
// area-average downscaling, and L2 normalization into encoded samples.
// Also a flat binary cache for preprocessed datasets.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qrobust/sample.hpp"

namespace qrobust {

inline constexpr int kMnistSide = 28;

struct RawImage {
    std::array<std::uint8_t, kMnistSide * kMnistSide> pixels;  // row-major
    int label = 0;  // 0..9
};

// Parses an images/labels IDX pair. Images must open with big-endian magic
// 0x00000803 and 28x28 geometry, labels with 0x00000801; the two counts must
// agree. Truncation errors report the byte offset where data ran out.
std::vector<RawImage> load_idx(const std::string& images_path,
                               const std::string& labels_path);

// Keep only labels 0 and 1, order preserved.
std::vector<RawImage> filter_binary(const std::vector<RawImage>& images);

using Grid16 = std::array<double, 16 * 16>;

// Area-weighted average resampling: each output pixel averages the
// overlapping 1.75 x 1.75 input region with weights proportional to overlap
// area (the weights form a partition of unity, so constants map to
// themselves).
Grid16 downscale_16(const RawImage& img);

// Row-major flatten to length 256 and L2-normalize. Rejects all-zero grids.
EncodedSample to_sample(const Grid16& grid, int label);

// Preprocessed dataset cache. Layout: magic "QRB1", u32 count, u32 dim,
// then per sample dim little-endian float64 features + 1 label byte.
void save_cache(const std::string& path, std::span<const EncodedSample> samples);
std::vector<EncodedSample> load_cache(const std::string& path);

}  // namespace qrobust
