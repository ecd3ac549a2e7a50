#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmac/bitvec.hpp"

namespace tmac {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadMagicError : DataError {
  using DataError::DataError;
};
struct TruncatedError : DataError {
  using DataError::DataError;
};
struct CountMismatchError : DataError {
  using DataError::DataError;
};

// Raw IDX payloads (big-endian header, byte pixels/labels). Paths ending in
// .gz are inflated transparently.
struct RawImages {
  std::uint32_t count = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols

  std::uint32_t pixels_per_image() const { return rows * cols; }
};
struct RawLabels {
  std::vector<std::uint8_t> labels;
};

RawImages load_idx_images(const std::filesystem::path& path);
RawLabels load_idx_labels(const std::filesystem::path& path);

// Real-valued rows with an integer label in the last column.
struct CsvDataset {
  std::vector<std::vector<double>> rows;
  std::vector<std::uint16_t> labels;
};
CsvDataset load_csv(const std::filesystem::path& path);

struct BooleanizedDataset {
  std::uint32_t feature_count = 0;
  std::uint32_t class_count = 0;
  std::vector<BitVec> samples;  // each feature_count bits
  std::vector<std::uint16_t> labels;

  std::size_t size() const { return samples.size(); }
};

// bit = 1 iff raw value > threshold. Throws CountMismatchError when image and
// label counts disagree.
BooleanizedDataset booleanize_threshold(const RawImages& images, const RawLabels& labels,
                                        std::uint8_t threshold, std::uint32_t class_count = 0);
BooleanizedDataset booleanize_threshold(const CsvDataset& csv, double threshold,
                                        std::uint32_t class_count = 0);

// Default pixel threshold: 30% of the byte range.
inline constexpr std::uint8_t kDefaultPixelThreshold = 76;

// Cache file for booleanized datasets (magic "TMDC", little-endian; layout in
// docs/formats.md).
void save_dataset_cache(const std::filesystem::path& path, const BooleanizedDataset& data);
BooleanizedDataset load_dataset_cache(const std::filesystem::path& path);

// XOR of two feature bits plus `noise_bits` irrelevant random bits; labels
// optionally flipped with probability `label_noise` (training-noise knob).
BooleanizedDataset make_xor_dataset(std::size_t samples, std::uint32_t noise_bits,
                                    std::uint64_t seed, double label_noise = 0.0);

}  // namespace tmac
