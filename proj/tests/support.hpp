// Copyright (C) 2026 The logoseek authors
//
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic synthetic fixtures shared by the test and acceptance suites.
//
// The color world draws each brand as one solid color from a palette chosen
// so that every color maps to a distinct histogram-bin triple and the white
// background occupies a bin no brand uses. Consequences relied on by tests:
// same-brand crops are pixel-identical (cosine similarity 1 between their
// descriptors), cross-brand similarities are strictly below 1, and a crop of
// pure background has similarity 0 to every brand crop.

#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "logoseek/logoseek.hpp"

namespace testsupport {

using namespace logoseek;

inline constexpr int kImageSide = 256;
inline constexpr int kCellSide = 64;    // 4x4 slot grid
inline constexpr int kLogoSide = 28;
inline constexpr int kLogoOffset = 4;   // logo inset within its slot
inline constexpr int kJitterShift = 30; // moves a box fully off its logo
inline constexpr std::size_t kMaxSlots = 16;

inline std::array<std::uint8_t, 3> brand_color(std::size_t brand_index) {
  static constexpr std::array<std::uint8_t, 4> vals = {16, 80, 144, 208};
  return {vals[brand_index % 4], vals[(brand_index / 4) % 4], vals[(brand_index / 16) % 4]};
}

inline std::string brand_name(std::size_t brand_index) {
  std::string n = std::to_string(brand_index);
  if (n.size() < 2) n = "0" + n;
  return "brand_" + n;
}

inline std::size_t brand_index_of(const std::string& brand) {
  return std::stoul(brand.substr(brand.find('_') + 1));
}

/// Renders any color-world record on demand: white background, one solid
/// brand-colored rectangle per RoI. Works for scene and query images alike.
inline ImageLoader color_world_loader() {
  return [](const ImageRecord& record) {
    PixelImage image = PixelImage::filled(record.width, record.height, 240, 240, 240);
    for (const RoI& roi : record.rois) {
      const auto c = brand_color(brand_index_of(roi.label.brand));
      fill_rect(image, {roi.x, roi.y, roi.w, roi.h}, c[0], c[1], c[2]);
    }
    return image;
  };
}

struct ColorWorld {
  Dataset scenes;   // evaluation dataset: n_images of 256x256 with slotted logos
  Dataset queries;  // one solid query crop per (brand, iteration)
};

/// Logos fill slots round-robin over brands, so brand counts are equal when
/// n_images * logos_per_image divides by n_brands.
inline ColorWorld make_color_world(std::size_t n_images, std::size_t logos_per_image,
                                   std::size_t n_brands, std::size_t n_iterations) {
  if (logos_per_image > kMaxSlots || n_brands > 64) {
    throw std::invalid_argument("color world limits exceeded");
  }
  ColorWorld world;
  world.scenes.name = "color-world";
  std::size_t next_logo = 0;
  for (std::size_t i = 0; i < n_images; ++i) {
    ImageRecord record;
    record.image_id = "img_" + std::to_string(1000 + i);
    record.path = record.image_id + ".ppm";
    record.width = kImageSide;
    record.height = kImageSide;
    for (std::size_t s = 0; s < logos_per_image; ++s) {
      const int col = static_cast<int>(s % 4);
      const int row = static_cast<int>(s / 4);
      RoI roi;
      roi.x = col * kCellSide + kLogoOffset;
      roi.y = row * kCellSide + kLogoOffset;
      roi.w = kLogoSide;
      roi.h = kLogoSide;
      roi.label.brand = brand_name(next_logo % n_brands);
      roi.label.kind = LogoKind::graphical;
      ++next_logo;
      record.rois.push_back(roi);
    }
    world.scenes.images.push_back(std::move(record));
  }

  world.queries.name = "color-world-queries";
  for (std::size_t b = 0; b < n_brands; ++b) {
    for (std::size_t it = 0; it < n_iterations; ++it) {
      ImageRecord record;
      record.image_id = "query_" + brand_name(b) + "_" + std::to_string(it);
      record.path = record.image_id + ".ppm";
      record.width = kCellSide;
      record.height = kCellSide;
      RoI roi;
      roi.x = kLogoOffset;
      roi.y = kLogoOffset;
      roi.w = kLogoSide;
      roi.h = kLogoSide;
      roi.label.brand = brand_name(b);
      roi.label.kind = LogoKind::graphical;
      record.rois.push_back(roi);
      world.queries.images.push_back(std::move(record));
    }
  }
  validate(world.scenes);
  validate(world.queries);
  return world;
}

/// Query-crop extractor rendering through the color-world loader.
inline QueryExtractor color_world_query_extractor() {
  return [loader = color_world_loader()](const ImageRecord& record, std::size_t roi_index) {
    return baseline_descriptor(loader(record), roi_box(record.rois.at(roi_index)));
  };
}

/// Oracle detections, except that every second logo of each brand is shifted
/// onto empty background (IoU 0 with its ground truth).
inline std::vector<Detection> jitter_half(const Dataset& scenes) {
  std::vector<Detection> detections;
  std::map<std::string, std::size_t> ordinal;
  for (const ImageRecord& image : scenes.images) {
    for (const RoI& roi : image.rois) {
      Box box = roi_box(roi);
      if (ordinal[roi.label.brand]++ % 2 == 1) {
        box.x += kJitterShift;
        box.y += kJitterShift;
      }
      detections.push_back({image.image_id, box, 1.0});
    }
  }
  return detections;
}

inline Box random_box(std::mt19937& rng, int max_side = 64) {
  std::uniform_int_distribution<int> pos(0, max_side - 25);
  std::uniform_int_distribution<int> len(1, 24);
  return Box{pos(rng), pos(rng), len(rng), len(rng)};
}

struct DetectionFixture {
  Dataset dataset;
  std::vector<Detection> detections;
};

/// Small random scene: 1-6 images of 64x64, 0-5 ground-truth boxes each,
/// 0-6 detections each with scores drawn from a coarse grid so threshold
/// ties occur. At least one ground-truth box overall.
inline DetectionFixture make_random_detection_fixture(std::mt19937& rng) {
  DetectionFixture fixture;
  fixture.dataset.name = "random";
  std::uniform_int_distribution<int> n_images_dist(1, 6);
  std::uniform_int_distribution<int> n_boxes_dist(0, 5);
  std::uniform_int_distribution<int> n_dets_dist(0, 6);
  std::uniform_int_distribution<int> score_dist(0, 20);
  const int n_images = n_images_dist(rng);
  for (int i = 0; i < n_images; ++i) {
    ImageRecord record;
    record.image_id = "r" + std::to_string(i);
    record.path = record.image_id + ".ppm";
    record.width = 64;
    record.height = 64;
    int n_boxes = n_boxes_dist(rng);
    if (i == 0 && n_boxes == 0) n_boxes = 1;
    for (int b = 0; b < n_boxes; ++b) {
      const Box box = random_box(rng);
      RoI roi;
      roi.x = box.x;
      roi.y = box.y;
      roi.w = box.w;
      roi.h = box.h;
      roi.label.brand = "b" + std::to_string(b % 3);
      record.rois.push_back(roi);
    }
    const int n_dets = n_dets_dist(rng);
    for (int d = 0; d < n_dets; ++d) {
      fixture.detections.push_back(
          {record.image_id, random_box(rng), score_dist(rng) / 20.0});
    }
    fixture.dataset.images.push_back(std::move(record));
  }
  validate(fixture.dataset);
  return fixture;
}

/// Random brand-labeled dataset over a 20-name pool, for split properties.
inline Dataset make_random_brand_dataset(std::mt19937& rng) {
  Dataset dataset;
  dataset.name = "random-brands";
  std::uniform_int_distribution<int> n_images_dist(1, 12);
  std::uniform_int_distribution<int> n_rois_dist(0, 4);
  std::uniform_int_distribution<int> brand_dist(0, 19);
  const int n_images = n_images_dist(rng);
  for (int i = 0; i < n_images; ++i) {
    ImageRecord record;
    record.image_id = "img" + std::to_string(i);
    record.path = record.image_id + ".ppm";
    record.width = 64;
    record.height = 64;
    const int n_rois = n_rois_dist(rng);
    for (int r = 0; r < n_rois; ++r) {
      const Box box = random_box(rng);
      RoI roi;
      roi.x = box.x;
      roi.y = box.y;
      roi.w = box.w;
      roi.h = box.h;
      roi.label.brand = "pool" + std::to_string(brand_dist(rng));
      record.rois.push_back(roi);
    }
    dataset.images.push_back(std::move(record));
  }
  validate(dataset);
  return dataset;
}

}  // namespace testsupport
