// Copyright (C) 2026 The logoseek authors
//
// SPDX-License-Identifier: Apache-2.0
//
// Tiny synthetic corpus shared by the sample programs: solid-color "logos"
// on a light background, two brands, plus one query crop per brand and
// iteration. Everything renders on demand, so no image files are required
// until a sample chooses to write them.

#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "logoseek/logoseek.hpp"

namespace demo {

inline std::array<std::uint8_t, 3> brand_color(const std::string& brand) {
  if (brand == "acme") return {200, 40, 40};
  return {40, 80, 200};  // "bolt"
}

/// Renders any demo record: light background, one solid rectangle per RoI.
inline logoseek::ImageLoader demo_loader() {
  return [](const logoseek::ImageRecord& record) {
    logoseek::PixelImage image =
        logoseek::PixelImage::filled(record.width, record.height, 240, 240, 240);
    for (const logoseek::RoI& roi : record.rois) {
      const auto c = brand_color(roi.label.brand);
      logoseek::fill_rect(image, logoseek::roi_box(roi), c[0], c[1], c[2]);
    }
    return image;
  };
}

struct DemoWorld {
  logoseek::Dataset scenes;
  logoseek::Dataset queries;
};

inline DemoWorld make_demo_world() {
  DemoWorld world;
  world.scenes.name = "demo";
  const std::array<std::string, 2> brands = {"acme", "bolt"};
  std::size_t next = 0;
  for (int i = 0; i < 4; ++i) {
    logoseek::ImageRecord record;
    record.image_id = "scene_" + std::to_string(i);
    record.path = record.image_id + ".ppm";
    record.width = record.height = 128;
    for (int s = 0; s < 2; ++s) {
      logoseek::RoI roi;
      roi.x = roi.y = s == 0 ? 8 : 72;
      roi.w = roi.h = 48;
      roi.label.brand = brands[next++ % brands.size()];
      roi.label.kind = logoseek::LogoKind::graphical;
      record.rois.push_back(roi);
    }
    world.scenes.images.push_back(record);
  }

  world.queries.name = "demo-queries";
  for (const std::string& brand : brands) {
    for (int it = 0; it < 2; ++it) {
      logoseek::ImageRecord record;
      record.image_id = "query_" + brand + "_" + std::to_string(it);
      record.path = record.image_id + ".ppm";
      record.width = record.height = 64;
      logoseek::RoI roi;
      roi.x = roi.y = 8;
      roi.w = roi.h = 48;
      roi.label.brand = brand;
      roi.label.kind = logoseek::LogoKind::graphical;
      record.rois.push_back(roi);
      world.queries.images.push_back(record);
    }
  }
  logoseek::validate(world.scenes);
  logoseek::validate(world.queries);
  return world;
}

}  // namespace demo
