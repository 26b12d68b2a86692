// Copyright (C) 2026 The logoseek authors
//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "logoseek/errors.hpp"

namespace logoseek {

/// Axis-aligned box in pixel coordinates: top-left corner plus extent.
/// A box covers the integer pixels [x, x+w) x [y, y+h).
struct Box {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  long long area() const { return static_cast<long long>(w) * h; }

  friend bool operator==(const Box&, const Box&) = default;
};

/// Intersection over union. 0 for disjoint boxes, 1 for identical ones.
inline double iou(const Box& a, const Box& b) {
  const long long ix = std::max(a.x, b.x);
  const long long iy = std::max(a.y, b.y);
  const long long ix2 = std::min(static_cast<long long>(a.x) + a.w, static_cast<long long>(b.x) + b.w);
  const long long iy2 = std::min(static_cast<long long>(a.y) + a.h, static_cast<long long>(b.y) + b.h);
  const long long iw = ix2 - ix;
  const long long ih = iy2 - iy;
  if (iw <= 0 || ih <= 0) return 0.0;
  const long long inter = iw * ih;
  const long long uni = a.area() + b.area() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

struct ScoredBox {
  Box box;
  double score = 0.0;
};

struct MatchPair {
  std::size_t detection = 0;
  std::size_t ground_truth = 0;
  double iou = 0.0;
};

/// Exclusive assignment of detections to ground-truth boxes. Every detection
/// index lands in exactly one of pairs/unmatched_detections, every ground-truth
/// index in exactly one of pairs/unmatched_ground_truths.
struct MatchResult {
  std::vector<MatchPair> pairs;
  std::vector<std::size_t> unmatched_detections;
  std::vector<std::size_t> unmatched_ground_truths;
};

/// Greedy score-ordered assignment. Detections are processed in descending
/// score order (ties by input index); each one takes the still-unmatched
/// ground truth with the highest IoU when that IoU reaches the threshold,
/// otherwise it is a false positive. Threshold must lie in (0, 1].
inline MatchResult greedy_match(std::span<const ScoredBox> detections,
                                std::span<const Box> ground_truths,
                                double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw Error("iou_threshold must be in (0,1], got " + std::to_string(iou_threshold));
  }

  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].score > detections[b].score;
  });

  MatchResult result;
  std::vector<bool> gt_taken(ground_truths.size(), false);
  for (const std::size_t di : order) {
    double best_iou = 0.0;
    std::size_t best_gt = ground_truths.size();
    for (std::size_t gi = 0; gi < ground_truths.size(); ++gi) {
      if (gt_taken[gi]) continue;
      const double overlap = iou(detections[di].box, ground_truths[gi]);
      if (overlap > best_iou) {
        best_iou = overlap;
        best_gt = gi;
      }
    }
    if (best_gt < ground_truths.size() && best_iou >= iou_threshold) {
      gt_taken[best_gt] = true;
      result.pairs.push_back({di, best_gt, best_iou});
    } else {
      result.unmatched_detections.push_back(di);
    }
  }
  std::sort(result.unmatched_detections.begin(), result.unmatched_detections.end());
  for (std::size_t gi = 0; gi < ground_truths.size(); ++gi) {
    if (!gt_taken[gi]) result.unmatched_ground_truths.push_back(gi);
  }
  return result;
}

}  // namespace logoseek
