#include "tmac/dataset.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tmac/rng.hpp"

#ifdef TMAC_HAVE_ZLIB
#include <zlib.h>
#endif

namespace tmac {
namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  const bool gz = path.extension() == ".gz";
#ifdef TMAC_HAVE_ZLIB
  if (gz) {
    gzFile f = gzopen(path.string().c_str(), "rb");
    if (!f) throw DataError("cannot open " + path.string());
    std::vector<std::uint8_t> out;
    std::uint8_t buf[1 << 16];
    int n;
    while ((n = gzread(f, buf, sizeof buf)) > 0) out.insert(out.end(), buf, buf + n);
    const bool bad = n < 0;
    gzclose(f);
    if (bad) throw DataError("gzip inflate failed for " + path.string());
    return out;
  }
#else
  if (gz) throw DataError("built without zlib, cannot read " + path.string());
#endif
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& b, std::size_t pos) {
  return (std::uint32_t{b[pos]} << 24) | (std::uint32_t{b[pos + 1]} << 16) |
         (std::uint32_t{b[pos + 2]} << 8) | std::uint32_t{b[pos + 3]};
}

void write_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

}  // namespace

RawImages load_idx_images(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() < 16) throw TruncatedError("IDX image header truncated: " + path.string());
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kImageMagic) {
    throw BadMagicError("wrong magic for IDX images (got 0x" + std::to_string(magic) + "): " +
                        path.string());
  }
  RawImages img;
  img.count = read_be32(bytes, 4);
  img.rows = read_be32(bytes, 8);
  img.cols = read_be32(bytes, 12);
  const std::size_t need = 16 + static_cast<std::size_t>(img.count) * img.rows * img.cols;
  if (bytes.size() < need) throw TruncatedError("IDX image payload truncated: " + path.string());
  img.pixels.assign(bytes.begin() + 16, bytes.begin() + static_cast<std::ptrdiff_t>(need));
  return img;
}

RawLabels load_idx_labels(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() < 8) throw TruncatedError("IDX label header truncated: " + path.string());
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kLabelMagic) {
    throw BadMagicError("wrong magic for IDX labels (got 0x" + std::to_string(magic) + "): " +
                        path.string());
  }
  const std::uint32_t count = read_be32(bytes, 4);
  if (bytes.size() < 8 + static_cast<std::size_t>(count)) {
    throw TruncatedError("IDX label payload truncated: " + path.string());
  }
  RawLabels lab;
  lab.labels.assign(bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(count));
  return lab;
}

CsvDataset load_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open " + path.string());
  CsvDataset out;
  std::string line;
  std::size_t width = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) values.push_back(std::stod(cell));
    if (values.size() < 2) throw DataError("CSV row needs at least one feature and a label");
    if (width == 0) width = values.size();
    if (values.size() != width) throw DataError("CSV rows have inconsistent column counts");
    const double label = values.back();
    values.pop_back();
    if (label < 0 || label != static_cast<double>(static_cast<std::uint16_t>(label))) {
      throw DataError("CSV label column must hold small non-negative integers");
    }
    out.labels.push_back(static_cast<std::uint16_t>(label));
    out.rows.push_back(std::move(values));
  }
  return out;
}

namespace {

std::uint32_t infer_class_count(const std::vector<std::uint16_t>& labels, std::uint32_t given) {
  std::uint32_t cl = given;
  if (cl == 0) {
    for (std::uint16_t l : labels) cl = std::max<std::uint32_t>(cl, l + 1u);
  }
  for (std::uint16_t l : labels) {
    if (l >= cl) throw DataError("label " + std::to_string(l) + " out of range");
  }
  return cl;
}

}  // namespace

BooleanizedDataset booleanize_threshold(const RawImages& images, const RawLabels& labels,
                                        std::uint8_t threshold, std::uint32_t class_count) {
  if (images.count != labels.labels.size()) {
    throw CountMismatchError("image count " + std::to_string(images.count) +
                             " != label count " + std::to_string(labels.labels.size()));
  }
  BooleanizedDataset out;
  out.feature_count = images.pixels_per_image();
  out.labels.assign(labels.labels.begin(), labels.labels.end());
  out.class_count = infer_class_count(out.labels, class_count);
  out.samples.reserve(images.count);
  for (std::uint32_t i = 0; i < images.count; ++i) {
    BitVec x(out.feature_count);
    const std::uint8_t* px = &images.pixels[static_cast<std::size_t>(i) * out.feature_count];
    for (std::uint32_t f = 0; f < out.feature_count; ++f) {
      if (px[f] > threshold) x.set(f);
    }
    out.samples.push_back(std::move(x));
  }
  return out;
}

BooleanizedDataset booleanize_threshold(const CsvDataset& csv, double threshold,
                                        std::uint32_t class_count) {
  BooleanizedDataset out;
  out.labels = csv.labels;
  out.class_count = infer_class_count(out.labels, class_count);
  out.feature_count = csv.rows.empty() ? 0 : static_cast<std::uint32_t>(csv.rows[0].size());
  out.samples.reserve(csv.rows.size());
  for (const auto& row : csv.rows) {
    BitVec x(out.feature_count);
    for (std::uint32_t f = 0; f < out.feature_count; ++f) {
      if (row[f] > threshold) x.set(f);
    }
    out.samples.push_back(std::move(x));
  }
  return out;
}

void save_dataset_cache(const std::filesystem::path& path, const BooleanizedDataset& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  f.write("TMDC", 4);
  write_u32(f, 1);  // format version
  write_u32(f, data.feature_count);
  write_u32(f, data.class_count);
  write_u32(f, static_cast<std::uint32_t>(data.size()));
  for (std::uint16_t l : data.labels) f.write(reinterpret_cast<const char*>(&l), 2);
  for (const BitVec& x : data.samples) {
    for (std::size_t w = 0; w < x.word_count(); ++w) {
      const std::uint64_t v = x.word(w);
      f.write(reinterpret_cast<const char*>(&v), 8);
    }
  }
}

BooleanizedDataset load_dataset_cache(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path.string());
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, "TMDC", 4) != 0) {
    throw BadMagicError("not a dataset cache: " + path.string());
  }
  const std::uint32_t version = read_u32(f);
  if (version != 1) throw DataError("unsupported dataset cache version");
  BooleanizedDataset data;
  data.feature_count = read_u32(f);
  data.class_count = read_u32(f);
  const std::uint32_t count = read_u32(f);
  data.labels.resize(count);
  for (auto& l : data.labels) f.read(reinterpret_cast<char*>(&l), 2);
  data.samples.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    BitVec x(data.feature_count);
    for (std::size_t w = 0; w < x.word_count(); ++w) {
      std::uint64_t v = 0;
      f.read(reinterpret_cast<char*>(&v), 8);
      x.set_word(w, v);
    }
    data.samples.push_back(std::move(x));
  }
  if (!f) throw TruncatedError("dataset cache truncated: " + path.string());
  return data;
}

BooleanizedDataset make_xor_dataset(std::size_t samples, std::uint32_t noise_bits,
                                    std::uint64_t seed, double label_noise) {
  const CounterRng rng(seed);
  BooleanizedDataset data;
  data.feature_count = 2 + noise_bits;
  data.class_count = 2;
  data.samples.reserve(samples);
  data.labels.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    BitVec x(data.feature_count);
    for (std::uint32_t f = 0; f < data.feature_count; ++f) {
      if (rng.unit(0, i, 0, 0, f) < 0.5) x.set(f);
    }
    bool label = x.get(0) != x.get(1);
    if (label_noise > 0 && rng.unit(0, i, 1, 0, 0) < label_noise) label = !label;
    data.samples.push_back(std::move(x));
    data.labels.push_back(label ? 1 : 0);
  }
  return data;
}

}  // namespace tmac
