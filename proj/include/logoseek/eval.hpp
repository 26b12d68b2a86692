// Copyright (C) 2026 The logoseek authors
//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
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
#include "logoseek/retrieval.hpp"
#include "logoseek/textio.hpp"

namespace logoseek {

struct FrocPoint {
  double fppi = 0.0;
  double rate = 0.0;
};

/// Detection (or identification) rate versus false positives per image,
/// swept over a score threshold. Points are sorted by fppi ascending and
/// rate is non-decreasing along the curve.
struct FrocCurve {
  std::vector<FrocPoint> points;
  std::size_t n_images = 0;
  std::size_t n_ground_truth = 0;
};

namespace detail {

/// Shared sweep core. `outcomes` holds (score, is_true_positive) per kept
/// detection; thresholds are the distinct scores, descending. The per-outcome
/// flags come from a greedy pass over the full list, which is valid at every
/// threshold because greedy assignment of a detection depends only on
/// higher-scored detections.
inline FrocCurve froc_sweep(std::vector<std::pair<double, bool>> outcomes, std::size_t n_images,
                            std::size_t n_ground_truth) {
  FrocCurve curve;
  curve.n_images = n_images;
  curve.n_ground_truth = n_ground_truth;
  if (outcomes.empty()) {
    curve.points.push_back({0.0, 0.0});
    return curve;
  }
  if (n_images == 0 || n_ground_truth == 0) {
    throw InternalError("froc sweep over zero images or zero ground truth");
  }
  std::sort(outcomes.begin(), outcomes.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].second) ++tp; else ++fp;
    const bool group_end = i + 1 == outcomes.size() || outcomes[i + 1].first != outcomes[i].first;
    if (group_end) {
      curve.points.push_back({static_cast<double>(fp) / static_cast<double>(n_images),
                              static_cast<double>(tp) / static_cast<double>(n_ground_truth)});
    }
  }
  return curve;
}

}  // namespace detail

/// Class-agnostic detection FROC: at each threshold (the distinct detector
/// scores), detections with score >= threshold are greedy-matched per image
/// against all ground-truth boxes. rate = matched GT / total GT; fppi =
/// unmatched detections / n_images, distractor images included.
inline FrocCurve detection_froc(std::span<const Detection> detections, const Dataset& dataset,
                                double iou_threshold) {
  std::map<std::string_view, std::size_t> image_of;
  std::size_t n_ground_truth = 0;
  for (std::size_t i = 0; i < dataset.images.size(); ++i) {
    image_of.emplace(dataset.images[i].image_id, i);
    n_ground_truth += dataset.images[i].rois.size();
  }
  if (n_ground_truth == 0) throw Error("dataset has no ground-truth RoIs");

  std::vector<std::vector<std::pair<ScoredBox, std::size_t>>> by_image(dataset.images.size());
  for (std::size_t di = 0; di < detections.size(); ++di) {
    const Detection& d = detections[di];
    const auto it = image_of.find(d.image_id);
    if (it == image_of.end()) {
      throw ValidationError("detection references unknown image_id '" + d.image_id + "'");
    }
    by_image[it->second].push_back({{d.box, d.score}, di});
  }

  std::vector<std::pair<double, bool>> outcomes(detections.size());
  for (std::size_t ii = 0; ii < dataset.images.size(); ++ii) {
    if (by_image[ii].empty()) continue;
    std::vector<ScoredBox> dets;
    dets.reserve(by_image[ii].size());
    for (const auto& [sb, di] : by_image[ii]) dets.push_back(sb);
    std::vector<Box> gts;
    gts.reserve(dataset.images[ii].rois.size());
    for (const RoI& roi : dataset.images[ii].rois) gts.push_back(roi_box(roi));

    const MatchResult result = greedy_match(dets, gts, iou_threshold);
    std::vector<bool> matched(dets.size(), false);
    for (const MatchPair& pair : result.pairs) matched[pair.detection] = true;
    for (std::size_t li = 0; li < by_image[ii].size(); ++li) {
      outcomes[by_image[ii][li].second] = {dets[li].score, matched[li]};
    }
  }
  return detail::froc_sweep(std::move(outcomes), dataset.images.size(), n_ground_truth);
}

namespace detail {

/// Per-rank identification flags for one query: a match is a true
/// identification iff its box consumes (IoU >= threshold, greedy in rank
/// order) a not-yet-consumed ground-truth RoI of the query brand. A box on
/// another brand's logo, or on no logo, is a false positive either way.
inline std::vector<bool> identification_flags(const Index& index,
                                              std::span<const RankedMatch> matches,
                                              const Dataset& dataset,
                                              const std::string& query_brand,
                                              double iou_threshold, std::size_t* n_relevant_out) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw Error("iou_threshold must be in (0, 1]");
  }
  std::map<std::string_view, std::vector<Box>> brand_boxes;
  std::size_t n_relevant = 0;
  for (const ImageRecord& image : dataset.images) {
    for (const RoI& roi : image.rois) {
      if (roi.label.brand == query_brand) {
        brand_boxes[image.image_id].push_back(roi_box(roi));
        ++n_relevant;
      }
    }
  }
  if (n_relevant == 0) throw Error("query brand '" + query_brand + "' absent from ground truth");
  if (n_relevant_out) *n_relevant_out = n_relevant;

  std::map<std::string_view, std::vector<bool>> consumed;
  for (const auto& [id, boxes] : brand_boxes) consumed[id].assign(boxes.size(), false);

  std::vector<bool> flags(matches.size(), false);
  for (std::size_t mi = 0; mi < matches.size(); ++mi) {
    if (matches[mi].entry_index >= index.entries.size()) {
      throw InternalError("ranked match entry_index out of range");
    }
    const IndexEntry& entry = index.entries[matches[mi].entry_index];
    const auto it = brand_boxes.find(entry.detection.image_id);
    if (it == brand_boxes.end()) continue;
    std::vector<bool>& used = consumed[it->first];
    double best_iou = 0.0;
    std::size_t best_gt = 0;
    bool found = false;
    for (std::size_t gi = 0; gi < it->second.size(); ++gi) {
      if (used[gi]) continue;
      const double overlap = iou(entry.detection.box, it->second[gi]);
      if (overlap >= iou_threshold && overlap > best_iou) {
        best_iou = overlap;
        best_gt = gi;
        found = true;
      }
    }
    if (found) {
      used[best_gt] = true;
      flags[mi] = true;
    }
  }
  return flags;
}

}  // namespace detail

/// Detection+identification FROC for one query's ranked matches. The sweep
/// runs over similarity thresholds; rate denominator is the number of
/// query-brand ground-truth RoIs and fppi counts kept matches that hit no
/// query-brand RoI, divided by the total image count.
inline FrocCurve identification_froc(const Index& index, std::span<const RankedMatch> matches,
                                     const Dataset& dataset, const std::string& query_brand,
                                     double iou_threshold) {
  const std::string brand = normalize_brand(query_brand);
  std::size_t n_relevant = 0;
  const std::vector<bool> flags =
      detail::identification_flags(index, matches, dataset, brand, iou_threshold, &n_relevant);
  std::vector<std::pair<double, bool>> outcomes;
  outcomes.reserve(matches.size());
  for (std::size_t mi = 0; mi < matches.size(); ++mi) {
    outcomes.push_back({matches[mi].similarity, flags[mi]});
  }
  return detail::froc_sweep(std::move(outcomes), dataset.images.size(), n_relevant);
}

/// Uninterpolated average precision over ranked relevance flags:
/// sum of precision-at-rank over relevant ranks, divided by n_relevant_total.
inline double average_precision(const std::vector<bool>& flags, std::size_t n_relevant_total) {
  if (n_relevant_total == 0) throw Error("average precision needs n_relevant_total >= 1");
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t r = 0; r < flags.size(); ++r) {
    if (!flags[r]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(r + 1);
  }
  if (hits > n_relevant_total) {
    throw Error("ranked list has more relevant results than n_relevant_total");
  }
  return sum / static_cast<double>(n_relevant_total);
}

/// 11-point interpolated variant: mean over recall levels {0.0, 0.1, .., 1.0}
/// of the maximum precision at any rank whose recall reaches the level.
inline double average_precision_11pt(const std::vector<bool>& flags,
                                     std::size_t n_relevant_total) {
  if (n_relevant_total == 0) throw Error("average precision needs n_relevant_total >= 1");
  std::size_t hits = 0;
  std::vector<std::pair<double, double>> recall_precision;
  for (std::size_t r = 0; r < flags.size(); ++r) {
    if (!flags[r]) continue;
    ++hits;
    recall_precision.push_back({static_cast<double>(hits) / static_cast<double>(n_relevant_total),
                                static_cast<double>(hits) / static_cast<double>(r + 1)});
  }
  if (hits > n_relevant_total) {
    throw Error("ranked list has more relevant results than n_relevant_total");
  }
  double sum = 0.0;
  for (int level = 0; level <= 10; ++level) {
    const double recall = static_cast<double>(level) / 10.0;
    double best = 0.0;
    for (const auto& [r, p] : recall_precision) {
      if (r >= recall - 1e-12) best = std::max(best, p);
    }
    sum += best;
  }
  return sum / 11.0;
}

/// Step-function lookup: rate of the last curve point with fppi <= the
/// requested value, 0 if the curve starts above it.
inline double operating_point(const FrocCurve& curve, double fppi) {
  if (curve.points.empty()) throw Error("operating point of an empty curve");
  double rate = 0.0;
  for (const FrocPoint& point : curve.points) {
    if (point.fppi <= fppi) rate = point.rate;
  }
  return rate;
}

inline const std::vector<double>& default_fppi_grid() {
  static const std::vector<double> grid = {1e-3, 1e-2, 1e-1, 1.0, 10.0};
  return grid;
}

struct ProtocolOptions {
  double iou_threshold = 0.5;
  std::vector<double> fppi_grid = default_fppi_grid();
  /// Query iterations to run; defaults to the smallest per-brand crop count.
  std::optional<std::size_t> iterations;
  /// Switches AP to the 11-point interpolated variant.
  bool eleven_point_ap = false;
};

/// Produces the query feature for crop `roi_index` of a query image.
using QueryExtractor = std::function<FeatureVector(const ImageRecord&, std::size_t roi_index)>;

struct QueryEvalResult {
  std::string brand;
  std::size_t iteration = 0;
  double ap = 0.0;
  FrocCurve curve;
};

struct EvalReport {
  double map = 0.0;
  double map_std = 0.0;
  std::size_t n_iterations = 0;
  std::vector<double> iteration_map;
  std::map<std::string, double> per_brand_ap;
  std::vector<double> fppi_grid;
  FrocCurve mean_curve;
  std::vector<double> curve_std;
  std::vector<QueryEvalResult> queries;
};

namespace detail {

inline double mean_of(std::span<const double> values) {
  double sum = 0.0;
  for (const double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

inline double population_std(std::span<const double> values, double mean) {
  double sum = 0.0;
  for (const double v : values) sum += (v - mean) * (v - mean);
  return std::sqrt(sum / static_cast<double>(values.size()));
}

}  // namespace detail

/// The open-set protocol: per iteration, one query crop per brand is embedded
/// and run against the index (min_similarity -1, no top_k); identification
/// relevance against that brand's ground truth gives its AP and FROC curve.
/// Per-iteration mAP is the mean over brands; map/map_std are the mean and
/// population std over iterations; the mean curve averages operating points
/// on the fppi grid the same way.
inline EvalReport run_open_set_protocol(const Index& index, const Dataset& ground_truth,
                                        const Dataset& query_source,
                                        const QueryExtractor& extractor,
                                        const ProtocolOptions& options = {}) {
  std::map<std::string, std::vector<std::pair<const ImageRecord*, std::size_t>>> crops;
  for (const ImageRecord& image : query_source.images) {
    for (std::size_t ri = 0; ri < image.rois.size(); ++ri) {
      crops[image.rois[ri].label.brand].push_back({&image, ri});
    }
  }
  if (crops.empty()) throw Error("query source has no crops");

  std::map<std::string, std::size_t> gt_count;
  for (const ImageRecord& image : ground_truth.images) {
    for (const RoI& roi : image.rois) ++gt_count[roi.label.brand];
  }
  std::string absent;
  for (const auto& [brand, list] : crops) {
    if (!gt_count.count(brand)) absent += (absent.empty() ? "" : ", ") + brand;
  }
  if (!absent.empty()) throw Error("query brand(s) absent from ground truth: " + absent);

  std::size_t n_iterations = options.iterations.value_or(
      std::min_element(crops.begin(), crops.end(), [](const auto& a, const auto& b) {
        return a.second.size() < b.second.size();
      })->second.size());
  if (n_iterations == 0) throw Error("protocol needs at least one iteration");
  for (const auto& [brand, list] : crops) {
    if (list.size() < n_iterations) {
      throw Error("missing query crop for brand '" + brand + "': have " +
                  std::to_string(list.size()) + ", need " + std::to_string(n_iterations));
    }
  }

  EvalReport report;
  report.n_iterations = n_iterations;
  report.fppi_grid = options.fppi_grid;

  std::map<std::string, std::vector<double>> brand_aps;
  // operating_rates[grid point][iteration] = mean over brands.
  std::vector<std::vector<double>> operating_rates(options.fppi_grid.size());

  for (std::size_t iter = 0; iter < n_iterations; ++iter) {
    std::vector<double> aps;
    std::vector<std::vector<double>> rates(options.fppi_grid.size());
    for (const auto& [brand, list] : crops) {
      const auto& [record, roi_index] = list[iter];
      const FeatureVector feature = extractor(*record, roi_index);
      const std::vector<RankedMatch> matches = query(index, feature, -1.0);

      std::size_t n_relevant = 0;
      const std::vector<bool> flags = detail::identification_flags(
          index, matches, ground_truth, brand, options.iou_threshold, &n_relevant);
      const double ap = options.eleven_point_ap ? average_precision_11pt(flags, n_relevant)
                                                : average_precision(flags, n_relevant);
      std::vector<std::pair<double, bool>> outcomes;
      outcomes.reserve(matches.size());
      for (std::size_t mi = 0; mi < matches.size(); ++mi) {
        outcomes.push_back({matches[mi].similarity, flags[mi]});
      }
      FrocCurve curve =
          detail::froc_sweep(std::move(outcomes), ground_truth.images.size(), n_relevant);
      for (std::size_t gi = 0; gi < options.fppi_grid.size(); ++gi) {
        rates[gi].push_back(operating_point(curve, options.fppi_grid[gi]));
      }
      aps.push_back(ap);
      brand_aps[brand].push_back(ap);
      report.queries.push_back({brand, iter, ap, std::move(curve)});
    }
    report.iteration_map.push_back(detail::mean_of(aps));
    for (std::size_t gi = 0; gi < options.fppi_grid.size(); ++gi) {
      operating_rates[gi].push_back(detail::mean_of(rates[gi]));
    }
  }

  report.map = detail::mean_of(report.iteration_map);
  report.map_std = detail::population_std(report.iteration_map, report.map);
  for (const auto& [brand, aps] : brand_aps) report.per_brand_ap[brand] = detail::mean_of(aps);

  report.mean_curve.n_images = ground_truth.images.size();
  for (const auto& [brand, list] : crops) report.mean_curve.n_ground_truth += gt_count[brand];
  for (std::size_t gi = 0; gi < options.fppi_grid.size(); ++gi) {
    const double mean_rate = detail::mean_of(operating_rates[gi]);
    report.mean_curve.points.push_back({options.fppi_grid[gi], mean_rate});
    report.curve_std.push_back(detail::population_std(operating_rates[gi], mean_rate));
  }
  return report;
}

inline nlohmann::ordered_json report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["map"] = report.map;
  j["map_std"] = report.map_std;
  j["n_iterations"] = report.n_iterations;
  j["iteration_map"] = report.iteration_map;
  auto per_brand = nlohmann::ordered_json::object();
  for (const auto& [brand, ap] : report.per_brand_ap) per_brand[brand] = ap;
  j["per_brand_ap"] = std::move(per_brand);
  auto curve = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < report.mean_curve.points.size(); ++i) {
    nlohmann::ordered_json point;
    point["fppi"] = report.mean_curve.points[i].fppi;
    point["rate"] = report.mean_curve.points[i].rate;
    point["std"] = report.curve_std[i];
    curve.push_back(std::move(point));
  }
  j["mean_curve"] = std::move(curve);
  return j;
}

inline std::string froc_to_csv(const FrocCurve& curve) {
  std::string out = "fppi,rate\n";
  for (const FrocPoint& p : curve.points) {
    out += format_double(p.fppi) + "," + format_double(p.rate) + "\n";
  }
  return out;
}

inline std::string mean_curve_to_csv(const EvalReport& report) {
  std::string out = "fppi,rate,std\n";
  for (std::size_t i = 0; i < report.mean_curve.points.size(); ++i) {
    out += format_double(report.mean_curve.points[i].fppi) + "," +
           format_double(report.mean_curve.points[i].rate) + "," +
           format_double(report.curve_std[i]) + "\n";
  }
  return out;
}

inline std::string per_brand_ap_to_csv(const EvalReport& report) {
  std::string out = "brand,ap\n";
  for (const auto& [brand, ap] : report.per_brand_ap) {
    if (brand.find(',') != std::string::npos || brand.find('\n') != std::string::npos) {
      throw Error("brand '" + brand + "' cannot be written to CSV");
    }
    out += brand + "," + format_double(ap) + "\n";
  }
  return out;
}

}  // namespace logoseek
