// Copyright (C) 2026 The logoseek authors
//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "logoseek/dataset.hpp"
#include "logoseek/errors.hpp"
#include "logoseek/features.hpp"
#include "logoseek/geometry.hpp"
#include "logoseek/image.hpp"
#include "logoseek/textio.hpp"

namespace logoseek {

/// Class-agnostic scored box from a detection provider.
struct Detection {
  std::string image_id;
  Box box;
  double score = 1.0;
};

inline Box roi_box(const RoI& roi) { return Box{roi.x, roi.y, roi.w, roi.h}; }

/// Perfect-detector provider: one detection per ground-truth RoI, score 1.0.
/// Isolates the comparison stage from detector quality.
inline std::vector<Detection> oracle_detections(const Dataset& dataset) {
  std::vector<Detection> detections;
  for (const ImageRecord& image : dataset.images) {
    for (const RoI& roi : image.rois) {
      detections.push_back({image.image_id, roi_box(roi), 1.0});
    }
  }
  return detections;
}

inline constexpr std::string_view kDetectionsCsvHeader = "image_id,x,y,w,h,score";

inline std::string detections_to_csv(std::span<const Detection> detections) {
  std::string out = std::string(kDetectionsCsvHeader) + "\n";
  for (const Detection& d : detections) {
    detail::check_embedding_id(d.image_id);
    out += d.image_id + "," + std::to_string(d.box.x) + "," + std::to_string(d.box.y) + "," +
           std::to_string(d.box.w) + "," + std::to_string(d.box.h) + "," +
           format_double(d.score) + "\n";
  }
  return out;
}

/// Parses the detections CSV. Scores must be in [0,1] and box extents positive;
/// whether an image_id exists in a dataset is checked at index-build time.
inline std::vector<Detection> detections_from_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || trim(lines[0]) != kDetectionsCsvHeader) {
    throw ParseError("detections CSV must start with header '" + std::string(kDetectionsCsvHeader) + "'");
  }
  std::vector<Detection> detections;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::string where = "line " + std::to_string(i + 1);
    const auto fields = split(lines[i], ',');
    if (fields.size() != 6) {
      throw ParseError(where + ": expected 6 fields, got " + std::to_string(fields.size()));
    }
    Detection d;
    d.image_id = std::string(fields[0]);
    if (d.image_id.empty()) throw ParseError(where + ": empty image_id");
    d.box.x = static_cast<int>(parse_int(fields[1], where + ": x"));
    d.box.y = static_cast<int>(parse_int(fields[2], where + ": y"));
    d.box.w = static_cast<int>(parse_int(fields[3], where + ": w"));
    d.box.h = static_cast<int>(parse_int(fields[4], where + ": h"));
    d.score = parse_double(fields[5], where + ": score");
    if (d.box.w <= 0 || d.box.h <= 0) throw ParseError(where + ": w/h must be positive");
    if (!(d.score >= 0.0 && d.score <= 1.0)) throw ParseError(where + ": score outside [0,1]");
    detections.push_back(std::move(d));
  }
  return detections;
}

inline std::vector<Detection> load_detections(const std::filesystem::path& path) {
  return detections_from_csv(read_text_file(path));
}

inline void save_detections(std::span<const Detection> detections,
                            const std::filesystem::path& path) {
  write_text_file(path, detections_to_csv(detections));
}

/// One indexed logo: its detection, the detection's ordinal within its image,
/// and the unit-norm feature.
struct IndexEntry {
  Detection detection;
  std::size_t roi_index = 0;
  FeatureVector feature;
};

/// Exhaustive-scan index over detected logos. Entries are sorted by
/// (image_id, detection input order), which makes builds deterministic.
struct Index {
  std::string dataset_name;
  std::size_t dim = 0;
  std::vector<IndexEntry> entries;
};

struct BuildOptions {
  /// Drops detections below this detector score before feature extraction.
  std::optional<double> min_detector_score;
};

using RegionExtractor = std::function<FeatureVector(const PixelImage&, const Box&)>;
using ImageLoader = std::function<PixelImage(const ImageRecord&)>;

inline RegionExtractor baseline_extractor() {
  return [](const PixelImage& image, const Box& region) {
    return baseline_descriptor(image, region);
  };
}

/// Loads `record.path` as a PPM file relative to `root`.
inline ImageLoader ppm_loader(std::filesystem::path root) {
  return [root = std::move(root)](const ImageRecord& record) {
    return load_ppm(root / record.path);
  };
}

namespace detail {

using EntryExtractor =
    std::function<FeatureVector(const ImageRecord&, std::size_t roi_index, const Box&)>;

inline Index build_index_impl(const Dataset& dataset, std::span<const Detection> detections,
                              const BuildOptions& options, const EntryExtractor& extract) {
  std::map<std::string_view, const ImageRecord*> records;
  for (const ImageRecord& image : dataset.images) records.emplace(image.image_id, &image);

  std::vector<std::size_t> order;
  order.reserve(detections.size());
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (options.min_detector_score && detections[i].score < *options.min_detector_score) continue;
    order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].image_id < detections[b].image_id;
  });

  Index index;
  index.dataset_name = dataset.name;
  std::string_view current_image;
  std::size_t ordinal = 0;
  for (const std::size_t di : order) {
    const Detection& d = detections[di];
    const auto it = records.find(d.image_id);
    if (it == records.end()) {
      throw ValidationError("detection references unknown image_id '" + d.image_id + "'");
    }
    const ImageRecord& record = *it->second;
    if (d.box.w <= 0 || d.box.h <= 0 || d.box.x < 0 || d.box.y < 0 ||
        static_cast<long long>(d.box.x) + d.box.w > record.width ||
        static_cast<long long>(d.box.y) + d.box.h > record.height) {
      throw ValidationError("detection box exceeds bounds of image '" + d.image_id + "'");
    }
    if (d.image_id != current_image) {
      current_image = d.image_id;
      ordinal = 0;
    }
    FeatureVector feature = l2_normalize(extract(record, ordinal, d.box));
    if (index.entries.empty()) {
      index.dim = feature.dim();
    } else if (feature.dim() != index.dim) {
      throw ValidationError("feature dimension drift at image '" + d.image_id + "': got " +
                            std::to_string(feature.dim()) + ", index dim is " +
                            std::to_string(index.dim));
    }
    index.entries.push_back({d, ordinal, std::move(feature)});
    ++ordinal;
  }
  return index;
}

}  // namespace detail

/// Builds the index by extracting a feature from every detection region.
/// Images are fetched through `loader`; consecutive detections of one image
/// reuse the loaded raster.
inline Index build_index(const Dataset& dataset, std::span<const Detection> detections,
                         const RegionExtractor& extractor, const ImageLoader& loader,
                         const BuildOptions& options = {}) {
  PixelImage cached;
  std::string cached_id;
  return detail::build_index_impl(
      dataset, detections, options,
      [&](const ImageRecord& record, std::size_t, const Box& box) {
        if (record.image_id != cached_id) {
          cached = loader(record);
          cached_id = record.image_id;
        }
        return extractor(cached, box);
      });
}

/// Builds the index from externally produced embeddings, keyed by
/// (image_id, detection ordinal within the image).
inline Index build_index(const Dataset& dataset, std::span<const Detection> detections,
                         const EmbeddingTable& table, const BuildOptions& options = {}) {
  return detail::build_index_impl(
      dataset, detections, options,
      [&](const ImageRecord& record, std::size_t ordinal, const Box&) {
        const auto it = table.entries.find(RoiKey{record.image_id, ordinal});
        if (it == table.entries.end()) {
          throw ValidationError("no embedding for image '" + record.image_id + "' roi " +
                                std::to_string(ordinal));
        }
        return it->second;
      });
}

/// One ranked result; `entry_index` points into Index::entries.
struct RankedMatch {
  std::size_t entry_index = 0;
  double similarity = 0.0;
};

/// Cosine ranking of all index entries against one query feature. Returns
/// entries with similarity >= min_similarity sorted by similarity descending,
/// ties by entry order (image_id, then roi order); truncated to top_k if set.
inline std::vector<RankedMatch> query(const Index& index, const FeatureVector& query_feature,
                                      double min_similarity,
                                      std::optional<std::size_t> top_k = std::nullopt) {
  if (index.entries.empty()) return {};
  if (query_feature.dim() != index.dim) {
    throw Error("query dimension mismatch: query has " + std::to_string(query_feature.dim()) +
                ", index has " + std::to_string(index.dim));
  }
  const FeatureVector q = l2_normalize(query_feature);
  std::vector<RankedMatch> matches;
  for (std::size_t i = 0; i < index.entries.size(); ++i) {
    double sum = 0.0;
    const std::vector<double>& e = index.entries[i].feature.values;
    for (std::size_t k = 0; k < e.size(); ++k) sum += e[k] * q.values[k];
    const double similarity = std::clamp(sum, -1.0, 1.0);
    if (similarity >= min_similarity) matches.push_back({i, similarity});
  }
  std::sort(matches.begin(), matches.end(), [](const RankedMatch& a, const RankedMatch& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.entry_index < b.entry_index;
  });
  if (top_k && matches.size() > *top_k) matches.resize(*top_k);
  return matches;
}

/// Extracts a feature from an image region, then ranks as `query` does.
inline std::vector<RankedMatch> query_from_region(const Index& index, const PixelImage& image,
                                                  const Box& region,
                                                  const RegionExtractor& extractor,
                                                  double min_similarity,
                                                  std::optional<std::size_t> top_k = std::nullopt) {
  return query(index, extractor(image, region), min_similarity, top_k);
}

/// Index file layout: one JSON header line (dataset name, dim, entry count,
/// and per-entry [x,y,w,h,score] boxes), then the embedding CSV body carrying
/// the entry keys and feature values in entry order.
inline std::string index_to_string(const Index& index) {
  nlohmann::ordered_json header;
  header["dataset"] = index.dataset_name;
  header["dim"] = index.dim;
  header["entries"] = index.entries.size();
  auto boxes = nlohmann::ordered_json::array();
  for (const IndexEntry& entry : index.entries) {
    boxes.push_back({entry.detection.box.x, entry.detection.box.y, entry.detection.box.w,
                     entry.detection.box.h, entry.detection.score});
  }
  header["boxes"] = std::move(boxes);

  std::string out = header.dump() + "\n";
  out += "dim=" + std::to_string(index.dim) + "\n";
  for (const IndexEntry& entry : index.entries) {
    detail::check_embedding_id(entry.detection.image_id);
    out += detail::embedding_row(RoiKey{entry.detection.image_id, entry.roi_index}, entry.feature);
  }
  return out;
}

inline Index index_from_string(std::string_view text) {
  const std::size_t header_end = text.find('\n');
  if (header_end == std::string_view::npos) throw ParseError("index file: missing header line");
  nlohmann::ordered_json header;
  try {
    header = nlohmann::ordered_json::parse(text.substr(0, header_end));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("index header: ") + e.what());
  }
  if (!header.is_object()) throw ParseError("index header: expected a JSON object");

  Index index;
  index.dataset_name = detail::jstr(header, "dataset", "index header");
  const auto& dim_field = detail::jfield(header, "dim", "index header");
  const auto& count_field = detail::jfield(header, "entries", "index header");
  if (!dim_field.is_number_unsigned() || !count_field.is_number_unsigned()) {
    throw ParseError("index header: dim/entries must be non-negative integers");
  }
  index.dim = dim_field.get<std::size_t>();
  const std::size_t n_entries = count_field.get<std::size_t>();
  const auto& boxes = detail::jfield(header, "boxes", "index header");
  if (!boxes.is_array() || boxes.size() != n_entries) {
    throw ParseError("index header: 'boxes' must list one [x,y,w,h,score] per entry");
  }

  const auto lines = split_lines(text.substr(header_end + 1));
  if (lines.empty() || lines[0] != "dim=" + std::to_string(index.dim)) {
    throw ParseError("index body must start with 'dim=" + std::to_string(index.dim) + "'");
  }

  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::string where = "index body line " + std::to_string(i + 1);
    const auto fields = split(lines[i], ',');
    if (fields.size() != index.dim + 2) {
      throw ParseError(where + ": expected " + std::to_string(index.dim + 2) + " fields");
    }
    IndexEntry entry;
    entry.detection.image_id = std::string(fields[0]);
    if (entry.detection.image_id.empty()) throw ParseError(where + ": empty image_id");
    entry.roi_index = parse_size(fields[1], where + ": roi_index");
    entry.feature.values.reserve(index.dim);
    for (std::size_t f = 2; f < fields.size(); ++f) {
      const double v = parse_double(fields[f], where + ": value");
      if (!std::isfinite(v)) throw ParseError(where + ": non-finite value");
      entry.feature.values.push_back(v);
    }
    const auto& box = boxes[index.entries.size()];
    if (!box.is_array() || box.size() != 5 || !box[0].is_number_integer() ||
        !box[1].is_number_integer() || !box[2].is_number_integer() || !box[3].is_number_integer() ||
        !box[4].is_number()) {
      throw ParseError(where + ": malformed box in header");
    }
    entry.detection.box = {box[0].get<int>(), box[1].get<int>(), box[2].get<int>(),
                           box[3].get<int>()};
    entry.detection.score = box[4].get<double>();
    if (std::abs(entry.feature.norm() - 1.0) > 1e-9) {
      throw ValidationError(where + ": stored feature is not unit norm");
    }
    index.entries.push_back(std::move(entry));
  }
  if (index.entries.size() != n_entries) {
    throw ParseError("index body has " + std::to_string(index.entries.size()) +
                     " entries, header says " + std::to_string(n_entries));
  }
  for (std::size_t i = 1; i < index.entries.size(); ++i) {
    const RoiKey prev{index.entries[i - 1].detection.image_id, index.entries[i - 1].roi_index};
    const RoiKey cur{index.entries[i].detection.image_id, index.entries[i].roi_index};
    if (!(prev < cur)) throw ValidationError("index entries out of canonical order");
  }
  return index;
}

inline Index load_index(const std::filesystem::path& path) {
  return index_from_string(read_text_file(path));
}

inline void save_index(const Index& index, const std::filesystem::path& path) {
  write_text_file(path, index_to_string(index));
}

}  // namespace logoseek
