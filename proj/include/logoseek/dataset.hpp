// Copyright (C) 2026 The logoseek authors
//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "logoseek/errors.hpp"
#include "logoseek/textio.hpp"

namespace logoseek {

enum class LogoKind { textual, graphical };

inline std::string_view to_string(LogoKind kind) {
  return kind == LogoKind::textual ? "textual" : "graphical";
}

inline LogoKind logo_kind_from_string(std::string_view text, const std::string& where) {
  if (text == "textual") return LogoKind::textual;
  if (text == "graphical") return LogoKind::graphical;
  throw ParseError(where + ": kind must be 'textual' or 'graphical', got '" + std::string(text) + "'");
}

/// Brand identity of one annotated logo. Retrieval treats two labels as the
/// same class iff their brand strings are equal; kind and variant are metadata.
struct BrandLabel {
  std::string brand;
  LogoKind kind = LogoKind::graphical;
  int variant = 0;

  friend auto operator<=>(const BrandLabel&, const BrandLabel&) = default;
};

/// Annotated logo bounding box, integer pixels, top-left corner convention.
struct RoI {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  BrandLabel label;
};

struct ImageRecord {
  std::string image_id;
  std::string path;
  int width = 0;
  int height = 0;
  std::vector<RoI> rois;  // empty list marks a distractor image
};

/// Immutable after load; all operations below are pure functions of it.
/// name/version are in-memory metadata, the JSONL format does not carry them.
struct Dataset {
  std::string name;
  std::string version;
  std::vector<ImageRecord> images;
};

struct DatasetStats {
  std::size_t n_brands = 0;
  std::size_t n_images = 0;
  std::size_t n_rois = 0;
  std::size_t max_rois_in_one_image = 0;
  std::map<std::string, std::size_t> rois_per_brand;
  std::map<std::size_t, std::size_t> rois_per_image_histogram;
  std::map<std::size_t, std::size_t> n_brands_with_at_least;
};

/// Thresholds exported in DatasetStats::n_brands_with_at_least.
inline constexpr std::size_t kBrandCountThresholds[] = {1, 2, 5, 10, 20, 50, 100};

/// Canonical brand form: ASCII-lowercased and trimmed.
inline std::string normalize_brand(std::string_view raw) { return lower_ascii(trim(raw)); }

/// Enforces all Dataset invariants; throws ValidationError naming the image.
inline void validate(const Dataset& dataset) {
  std::unordered_set<std::string_view> seen_ids;
  for (const ImageRecord& image : dataset.images) {
    const std::string& id = image.image_id;
    if (id.empty()) throw ValidationError("image with empty image_id");
    if (!seen_ids.insert(id).second) throw ValidationError("duplicate image_id '" + id + "'");
    if (image.width <= 0 || image.height <= 0) {
      throw ValidationError("image '" + id + "': width/height must be positive");
    }
    for (const RoI& roi : image.rois) {
      if (roi.w <= 0 || roi.h <= 0) {
        throw ValidationError("image '" + id + "': RoI w/h must be positive");
      }
      if (roi.x < 0 || roi.y < 0 ||
          static_cast<long long>(roi.x) + roi.w > image.width ||
          static_cast<long long>(roi.y) + roi.h > image.height) {
        throw ValidationError("image '" + id + "': RoI exceeds image bounds");
      }
      if (roi.label.brand.empty()) {
        throw ValidationError("image '" + id + "': RoI with empty brand");
      }
      if (roi.label.brand != normalize_brand(roi.label.brand)) {
        throw ValidationError("image '" + id + "': brand '" + roi.label.brand +
                              "' is not lowercased/trimmed");
      }
      if (roi.label.variant < 0) {
        throw ValidationError("image '" + id + "': variant must be non-negative");
      }
    }
  }
}

namespace detail {

inline const nlohmann::ordered_json& jfield(const nlohmann::ordered_json& obj, const char* key,
                                            const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

inline int jint(const nlohmann::ordered_json& obj, const char* key, const std::string& where) {
  const auto& v = jfield(obj, key, where);
  if (!v.is_number_integer()) {
    throw ParseError(where + ": field '" + key + "' must be an integer");
  }
  return v.get<int>();
}

inline std::string jstr(const nlohmann::ordered_json& obj, const char* key, const std::string& where) {
  const auto& v = jfield(obj, key, where);
  if (!v.is_string()) throw ParseError(where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

inline ImageRecord record_from_json(const nlohmann::ordered_json& obj, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected a JSON object");
  ImageRecord record;
  record.image_id = jstr(obj, "image_id", where);
  record.path = jstr(obj, "path", where);
  record.width = jint(obj, "width", where);
  record.height = jint(obj, "height", where);
  const auto& rois = jfield(obj, "rois", where);
  if (!rois.is_array()) throw ParseError(where + ": field 'rois' must be an array");
  for (const auto& roi_json : rois) {
    if (!roi_json.is_object()) throw ParseError(where + ": roi entries must be objects");
    RoI roi;
    roi.x = jint(roi_json, "x", where);
    roi.y = jint(roi_json, "y", where);
    roi.w = jint(roi_json, "w", where);
    roi.h = jint(roi_json, "h", where);
    roi.label.brand = normalize_brand(jstr(roi_json, "brand", where));
    roi.label.kind = logo_kind_from_string(jstr(roi_json, "kind", where), where);
    roi.label.variant = jint(roi_json, "variant", where);
    record.rois.push_back(std::move(roi));
  }
  return record;
}

inline nlohmann::ordered_json record_to_json(const ImageRecord& record) {
  nlohmann::ordered_json obj;
  obj["image_id"] = record.image_id;
  obj["path"] = record.path;
  obj["width"] = record.width;
  obj["height"] = record.height;
  auto rois = nlohmann::ordered_json::array();
  for (const RoI& roi : record.rois) {
    nlohmann::ordered_json r;
    r["x"] = roi.x;
    r["y"] = roi.y;
    r["w"] = roi.w;
    r["h"] = roi.h;
    r["brand"] = roi.label.brand;
    r["kind"] = std::string(to_string(roi.label.kind));
    r["variant"] = roi.label.variant;
    rois.push_back(std::move(r));
  }
  obj["rois"] = std::move(rois);
  return obj;
}

}  // namespace detail

/// Canonical JSONL serialization: one image object per line, fixed key order,
/// LF endings. save(load(f)) is byte-identical for canonical input.
inline std::string dataset_to_jsonl(const Dataset& dataset) {
  std::string out;
  for (const ImageRecord& record : dataset.images) {
    out += detail::record_to_json(record).dump();
    out += '\n';
  }
  return out;
}

inline Dataset dataset_from_jsonl(std::string_view text, std::string name) {
  Dataset dataset;
  dataset.name = std::move(name);
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::string where = "line " + std::to_string(i + 1);
    nlohmann::ordered_json obj;
    try {
      obj = nlohmann::ordered_json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(where + ": " + e.what());
    }
    dataset.images.push_back(detail::record_from_json(obj, where));
  }
  validate(dataset);
  return dataset;
}

inline Dataset load_dataset(const std::filesystem::path& path) {
  return dataset_from_jsonl(read_text_file(path), path.stem().string());
}

inline void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  write_text_file(path, dataset_to_jsonl(dataset));
}

inline DatasetStats stats(const Dataset& dataset) {
  DatasetStats s;
  s.n_images = dataset.images.size();
  for (const ImageRecord& image : dataset.images) {
    s.n_rois += image.rois.size();
    s.max_rois_in_one_image = std::max(s.max_rois_in_one_image, image.rois.size());
    ++s.rois_per_image_histogram[image.rois.size()];
    for (const RoI& roi : image.rois) ++s.rois_per_brand[roi.label.brand];
  }
  s.n_brands = s.rois_per_brand.size();
  for (const std::size_t threshold : kBrandCountThresholds) {
    std::size_t count = 0;
    for (const auto& [brand, n] : s.rois_per_brand) {
      if (n >= threshold) ++count;
    }
    s.n_brands_with_at_least[threshold] = count;
  }
  return s;
}

inline nlohmann::ordered_json stats_to_json(const DatasetStats& s) {
  nlohmann::ordered_json obj;
  obj["n_brands"] = s.n_brands;
  obj["n_images"] = s.n_images;
  obj["n_rois"] = s.n_rois;
  obj["max_rois_in_one_image"] = s.max_rois_in_one_image;
  nlohmann::ordered_json per_brand;
  for (const auto& [brand, count] : s.rois_per_brand) per_brand[brand] = count;
  obj["rois_per_brand"] = std::move(per_brand);
  nlohmann::ordered_json histogram;
  for (const auto& [rois, images] : s.rois_per_image_histogram) {
    histogram[std::to_string(rois)] = images;
  }
  obj["rois_per_image_histogram"] = std::move(histogram);
  nlohmann::ordered_json at_least;
  for (const auto& [threshold, count] : s.n_brands_with_at_least) {
    at_least[std::to_string(threshold)] = count;
  }
  obj["n_brands_with_at_least"] = std::move(at_least);
  return obj;
}

/// Removes every RoI whose brand is in `brands`. Images annotated before but
/// left with zero RoIs are dropped; natively empty distractor images stay.
inline Dataset exclude_brands(const Dataset& dataset, const std::set<std::string>& brands) {
  std::set<std::string> excluded;
  for (const std::string& b : brands) excluded.insert(normalize_brand(b));

  Dataset out;
  out.name = dataset.name;
  out.version = dataset.version;
  for (const ImageRecord& image : dataset.images) {
    ImageRecord kept = image;
    if (!image.rois.empty()) {
      kept.rois.clear();
      for (const RoI& roi : image.rois) {
        if (!excluded.contains(roi.label.brand)) kept.rois.push_back(roi);
      }
      if (kept.rois.empty()) continue;
    }
    out.images.push_back(std::move(kept));
  }
  return out;
}

/// Stable 64-bit FNV-1a over the bytes of `s`.
inline std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

struct SplitResult {
  Dataset train;
  Dataset validation;
};

/// Deterministic image-level holdout: an image goes to validation iff
/// fnv1a64(image_id) mod 10000 < fraction * 10000. Pure function of the
/// image ids, so the partition is identical across runs and implementations.
inline SplitResult holdout_split(const Dataset& dataset, double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error("holdout fraction must be in [0,1], got " + std::to_string(fraction));
  }
  SplitResult result;
  result.train.name = dataset.name;
  result.train.version = dataset.version;
  result.validation.name = dataset.name;
  result.validation.version = dataset.version;
  const double cut = fraction * 10000.0;
  for (const ImageRecord& image : dataset.images) {
    const bool to_validation = static_cast<double>(fnv1a64(image.image_id) % 10000) < cut;
    (to_validation ? result.validation : result.train).images.push_back(image);
  }
  return result;
}

/// Union of images. A shared image_id is an error.
inline Dataset merge(const Dataset& a, const Dataset& b) {
  Dataset out;
  if (a.name.empty() || b.name.empty()) {
    out.name = a.name.empty() ? b.name : a.name;
  } else {
    out.name = a.name + "+" + b.name;
  }
  out.version = a.version == b.version ? a.version : "";
  out.images = a.images;
  std::unordered_set<std::string_view> ids;
  for (const ImageRecord& image : a.images) ids.insert(image.image_id);
  for (const ImageRecord& image : b.images) {
    if (ids.contains(image.image_id)) {
      throw ValidationError("merge: duplicate image_id '" + image.image_id + "'");
    }
    out.images.push_back(image);
  }
  return out;
}

}  // namespace logoseek
