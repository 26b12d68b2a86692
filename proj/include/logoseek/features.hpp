// Copyright (C) 2026 The logoseek authors
//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "logoseek/errors.hpp"
#include "logoseek/geometry.hpp"
#include "logoseek/image.hpp"
#include "logoseek/textio.hpp"

namespace logoseek {

/// Fixed-dimension real descriptor of one logo region.
struct FeatureVector {
  std::vector<double> values;

  FeatureVector() = default;
  explicit FeatureVector(std::vector<double> v) : values(std::move(v)) {}

  std::size_t dim() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  double norm() const {
    double sum = 0.0;
    for (const double v : values) sum += v * v;
    return std::sqrt(sum);
  }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

inline double dot(const FeatureVector& a, const FeatureVector& b) {
  if (a.dim() != b.dim()) {
    throw Error("dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) sum += a.values[i] * b.values[i];
  return sum;
}

inline FeatureVector l2_normalize(const FeatureVector& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error("cannot normalize a zero or non-finite vector");
  }
  FeatureVector out = v;
  for (double& x : out.values) x /= n;
  return out;
}

/// Cosine of the angle between a and b, clamped to [-1, 1].
inline double cosine_similarity(const FeatureVector& a, const FeatureVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) throw Error("cosine similarity of a zero vector");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

inline constexpr int kDescriptorResample = 64;  // region is resampled to 64x64
inline constexpr int kDescriptorCells = 4;      // 4x4 cell grid
inline constexpr int kDescriptorBins = 8;       // per-channel histogram bins
inline constexpr std::size_t kDescriptorDim = 384;  // 4*4 cells * 3 channels * 8 bins

/// Deterministic color-layout descriptor: the region is resampled to 64x64 by
/// nearest neighbor (floor indexing), split into a 4x4 cell grid, and each cell
/// contributes an 8-bin histogram per RGB channel (bin = value / 32). Cells are
/// concatenated row-major with channels in R,G,B order, counts divided by the
/// cell pixel count, and the result L2-normalized.
inline FeatureVector baseline_descriptor(const PixelImage& image, const Box& region) {
  if (region.w <= 0 || region.h <= 0 || region.x < 0 || region.y < 0 ||
      static_cast<long long>(region.x) + region.w > image.width ||
      static_cast<long long>(region.y) + region.h > image.height) {
    throw Error("descriptor region out of image bounds");
  }

  constexpr int kSide = kDescriptorResample;
  constexpr int kCellSide = kSide / kDescriptorCells;
  constexpr double kCellPixels = static_cast<double>(kCellSide) * kCellSide;

  FeatureVector feature;
  feature.values.assign(kDescriptorDim, 0.0);
  for (int ty = 0; ty < kSide; ++ty) {
    const int sy = region.y + static_cast<int>(static_cast<long long>(region.h) * ty / kSide);
    const int cell_row = ty / kCellSide;
    for (int tx = 0; tx < kSide; ++tx) {
      const int sx = region.x + static_cast<int>(static_cast<long long>(region.w) * tx / kSide);
      const int cell = cell_row * kDescriptorCells + tx / kCellSide;
      const std::uint8_t* p = image.pixel(sx, sy);
      double* hist = feature.values.data() + cell * 3 * kDescriptorBins;
      hist[p[0] / 32] += 1.0;
      hist[kDescriptorBins + p[1] / 32] += 1.0;
      hist[2 * kDescriptorBins + p[2] / 32] += 1.0;
    }
  }
  for (double& v : feature.values) v /= kCellPixels;
  return l2_normalize(feature);
}

/// Key of one extracted region: the image it came from plus the region's
/// ordinal within that image (RoI order for oracle boxes, detection order
/// otherwise).
struct RoiKey {
  std::string image_id;
  std::size_t roi_index = 0;

  friend auto operator<=>(const RoiKey&, const RoiKey&) = default;
};

/// External embeddings, one fixed-dimension vector per region key.
struct EmbeddingTable {
  std::size_t dim = 0;
  std::map<RoiKey, FeatureVector> entries;
};

namespace detail {

inline void check_embedding_id(std::string_view image_id) {
  if (image_id.empty()) throw ValidationError("empty image_id in embedding entry");
  if (image_id.find_first_of(",\n\r") != std::string_view::npos) {
    throw ValidationError("image_id '" + std::string(image_id) +
                          "' may not contain commas or line breaks");
  }
}

inline std::string embedding_row(const RoiKey& key, const FeatureVector& feature) {
  std::string line = key.image_id + "," + std::to_string(key.roi_index);
  for (const double v : feature.values) {
    line += ',';
    line += format_double(v);
  }
  line += '\n';
  return line;
}

}  // namespace detail

/// CSV layout: first line `dim=N`, then `image_id,roi_index,v1,...,vN` per
/// entry, sorted by key. Values use shortest-round-trip decimal text, so a
/// save/load cycle reproduces every double exactly.
inline std::string embeddings_to_csv(const EmbeddingTable& table) {
  std::string out = "dim=" + std::to_string(table.dim) + "\n";
  for (const auto& [key, feature] : table.entries) {
    detail::check_embedding_id(key.image_id);
    if (feature.dim() != table.dim) {
      throw ValidationError("embedding for '" + key.image_id + "' has dim " +
                            std::to_string(feature.dim()) + ", table dim is " +
                            std::to_string(table.dim));
    }
    out += detail::embedding_row(key, feature);
  }
  return out;
}

inline EmbeddingTable embeddings_from_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || !lines[0].starts_with("dim=")) {
    throw ParseError("embedding CSV must start with a 'dim=N' line");
  }
  EmbeddingTable table;
  table.dim = parse_size(lines[0].substr(4), "embedding dim");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::string where = "line " + std::to_string(i + 1);
    const auto fields = split(lines[i], ',');
    if (fields.size() != table.dim + 2) {
      throw ParseError(where + ": expected " + std::to_string(table.dim + 2) +
                       " fields, got " + std::to_string(fields.size()));
    }
    RoiKey key;
    key.image_id = std::string(fields[0]);
    detail::check_embedding_id(key.image_id);
    key.roi_index = parse_size(fields[1], where + ": roi_index");
    FeatureVector feature;
    feature.values.reserve(table.dim);
    for (std::size_t f = 2; f < fields.size(); ++f) {
      const double v = parse_double(fields[f], where + ": value");
      if (!std::isfinite(v)) throw ParseError(where + ": non-finite value");
      feature.values.push_back(v);
    }
    if (!table.entries.emplace(std::move(key), std::move(feature)).second) {
      throw ParseError(where + ": duplicate roi_key");
    }
  }
  return table;
}

inline EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  return embeddings_from_csv(read_text_file(path));
}

inline void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  write_text_file(path, embeddings_to_csv(table));
}

}  // namespace logoseek
