// Copyright (C) 2026 The logoseek authors
//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "logoseek/errors.hpp"
#include "logoseek/geometry.hpp"
#include "logoseek/textio.hpp"

namespace logoseek {

/// Interleaved 8-bit RGB raster, row-major.
struct PixelImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  static PixelImage filled(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    PixelImage image;
    image.width = width;
    image.height = height;
    image.data.resize(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t i = 0; i < image.data.size(); i += 3) {
      image.data[i] = r;
      image.data[i + 1] = g;
      image.data[i + 2] = b;
    }
    return image;
  }

  const std::uint8_t* pixel(int x, int y) const {
    return data.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }
  std::uint8_t* pixel(int x, int y) {
    return data.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }

  friend bool operator==(const PixelImage&, const PixelImage&) = default;
};

/// Paints a rectangle, clipped to the image bounds.
inline void fill_rect(PixelImage& image, const Box& box, std::uint8_t r, std::uint8_t g,
                      std::uint8_t b) {
  const int x0 = std::max(box.x, 0);
  const int y0 = std::max(box.y, 0);
  const int x1 = std::min(box.x + box.w, image.width);
  const int y1 = std::min(box.y + box.h, image.height);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      std::uint8_t* p = image.pixel(x, y);
      p[0] = r;
      p[1] = g;
      p[2] = b;
    }
  }
}

namespace detail {

struct PpmTokenizer {
  std::string_view text;
  std::size_t pos = 0;

  // Skips whitespace and '#' comments, then reads one bare token.
  std::string_view next(const std::string& where) {
    while (pos < text.size()) {
      const char c = text[pos];
      if (c == '#') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
           text[pos] != '#') {
      ++pos;
    }
    if (start == pos) throw ParseError(where + ": truncated PPM header");
    return text.substr(start, pos - start);
  }
};

}  // namespace detail

/// Reads a PPM image (binary P6 or ASCII P3, maxval 255).
inline PixelImage load_ppm(const std::filesystem::path& path) {
  const std::string raw = read_text_file(path);
  const std::string where = path.filename().string();
  detail::PpmTokenizer tok{raw};
  const std::string_view magic = tok.next(where);
  if (magic != "P6" && magic != "P3") {
    throw ParseError(where + ": not a P6/P3 PPM file");
  }
  const long long width = parse_int(tok.next(where), where + ": width");
  const long long height = parse_int(tok.next(where), where + ": height");
  const long long maxval = parse_int(tok.next(where), where + ": maxval");
  if (width <= 0 || height <= 0) throw ParseError(where + ": non-positive dimensions");
  if (maxval != 255) throw ParseError(where + ": only maxval 255 is supported");

  PixelImage image;
  image.width = static_cast<int>(width);
  image.height = static_cast<int>(height);
  const std::size_t n = static_cast<std::size_t>(width) * height * 3;
  image.data.resize(n);

  if (magic == "P6") {
    // Exactly one whitespace byte separates the header from the raster.
    if (tok.pos >= raw.size()) throw ParseError(where + ": truncated pixel data");
    ++tok.pos;
    if (raw.size() - tok.pos < n) throw ParseError(where + ": truncated pixel data");
    std::copy_n(reinterpret_cast<const std::uint8_t*>(raw.data()) + tok.pos, n,
                image.data.begin());
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const long long v = parse_int(tok.next(where), where + ": sample");
      if (v < 0 || v > 255) throw ParseError(where + ": sample out of range");
      image.data[i] = static_cast<std::uint8_t>(v);
    }
  }
  return image;
}

/// Writes binary P6, maxval 255.
inline void save_ppm(const PixelImage& image, const std::filesystem::path& path) {
  if (image.width <= 0 || image.height <= 0 ||
      image.data.size() != static_cast<std::size_t>(image.width) * image.height * 3) {
    throw Error("save_ppm: inconsistent image buffer");
  }
  std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                    "\n255\n";
  out.append(reinterpret_cast<const char*>(image.data.data()), image.data.size());
  write_text_file(path, out);
}

}  // namespace logoseek
