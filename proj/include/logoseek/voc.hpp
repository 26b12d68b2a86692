// Copyright (C) 2026 The logoseek authors
//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "logoseek/dataset.hpp"
#include "logoseek/errors.hpp"

namespace logoseek {

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace detail

/// Object-name convention for VOC imports: a trailing "-<digits>" selects the
/// variant, a trailing "-text" (after the variant is stripped) marks a textual
/// logo. Hyphens inside the brand itself are preserved ("coca-cola").
inline BrandLabel parse_voc_object_name(std::string_view name) {
  BrandLabel label;
  std::string_view rest = trim(name);
  if (const auto pos = rest.rfind('-'); pos != std::string_view::npos && pos > 0) {
    const std::string_view tail = rest.substr(pos + 1);
    if (detail::all_digits(tail)) {
      label.variant = static_cast<int>(parse_int(tail, "variant suffix"));
      rest = rest.substr(0, pos);
    }
  }
  if (const auto pos = rest.rfind('-'); pos != std::string_view::npos && pos > 0) {
    if (rest.substr(pos + 1) == "text") {
      label.kind = LogoKind::textual;
      rest = rest.substr(0, pos);
    }
  }
  label.brand = normalize_brand(rest);
  return label;
}

/// Converts a directory tree of per-image VOC XML annotation files into the
/// canonical dataset model. Files are processed in path order; the image_id
/// is the path relative to the root with the extension stripped, so nested
/// per-brand layouts produce collision-free ids.
inline Dataset import_voc_xml(const std::filesystem::path& directory) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) {
    throw Error("not a directory: " + directory.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(directory)) {
    if (entry.is_regular_file() && entry.path().extension() == ".xml") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  Dataset dataset;
  dataset.name = directory.filename().string();
  for (const fs::path& file : files) {
    const std::string where = file.lexically_relative(directory).generic_string();
    boost::property_tree::ptree tree;
    try {
      std::ifstream in(file);
      if (!in) throw Error("cannot open file: " + file.string());
      boost::property_tree::read_xml(in, tree);
    } catch (const boost::property_tree::xml_parser_error& e) {
      throw ParseError(where + ": malformed XML: " + e.message());
    }

    ImageRecord record;
    record.image_id = file.lexically_relative(directory).replace_extension().generic_string();
    try {
      const auto& annotation = tree.get_child("annotation");
      record.path = annotation.get<std::string>("filename", record.image_id + ".jpg");
      record.width = annotation.get<int>("size.width");
      record.height = annotation.get<int>("size.height");
      for (const auto& [key, node] : annotation) {
        if (key != "object") continue;
        const auto name = node.get<std::string>("name");
        const int xmin = node.get<int>("bndbox.xmin");
        const int ymin = node.get<int>("bndbox.ymin");
        const int xmax = node.get<int>("bndbox.xmax");
        const int ymax = node.get<int>("bndbox.ymax");
        if (xmax <= xmin || ymax <= ymin) {
          throw ParseError(where + ": degenerate bndbox for object '" + name + "'");
        }
        RoI roi;
        roi.x = xmin;
        roi.y = ymin;
        roi.w = xmax - xmin;
        roi.h = ymax - ymin;
        roi.label = parse_voc_object_name(name);
        if (roi.label.brand.empty()) {
          throw ParseError(where + ": object with empty brand name");
        }
        record.rois.push_back(std::move(roi));
      }
    } catch (const boost::property_tree::ptree_error& e) {
      throw ParseError(where + ": " + e.what());
    }
    dataset.images.push_back(std::move(record));
  }
  try {
    validate(dataset);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("VOC import: ") + e.what());
  }
  return dataset;
}

}  // namespace logoseek
