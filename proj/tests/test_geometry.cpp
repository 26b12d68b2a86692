// Copyright (C) 2026 The logoseek authors
//
// SPDX-License-Identifier: Apache-2.0
//

#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "logoseek/geometry.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace logoseek;

TEST_CASE("iou of identical boxes is 1") {
  const Box box{3, 7, 11, 5};
  CHECK(iou(box, box) == 1.0);
}

TEST_CASE("iou of disjoint boxes is 0") {
  CHECK(iou({0, 0, 10, 10}, {20, 20, 5, 5}) == 0.0);
}

TEST_CASE("iou of half-offset boxes is 25/175") {
  CHECK(iou({0, 0, 10, 10}, {5, 5, 10, 10}) == 25.0 / 175.0);
}

TEST_CASE("iou fuzzing: symmetry, identity, range, pixel-count oracle") {
  std::mt19937 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Box a = testsupport::random_box(rng);
    const Box b = testsupport::random_box(rng);
    const double ab = iou(a, b);
    CHECK(ab == iou(b, a));
    CHECK(iou(a, a) == 1.0);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK_THAT(ab, Catch::Matchers::WithinAbs(oracles::oracle_iou(a, b), 1e-12));
  }
}

TEST_CASE("greedy_match with no detections reports all misses") {
  const std::vector<Box> gts = {{0, 0, 10, 10}, {20, 20, 10, 10}};
  const MatchResult result = greedy_match({}, gts, 0.5);
  CHECK(result.pairs.empty());
  CHECK(result.unmatched_detections.empty());
  CHECK(result.unmatched_ground_truths == std::vector<std::size_t>{0, 1});
}

TEST_CASE("greedy_match pairs an exact hit with iou 1") {
  const std::vector<ScoredBox> dets = {{{4, 4, 8, 8}, 0.7}};
  const std::vector<Box> gts = {{4, 4, 8, 8}};
  const MatchResult result = greedy_match(dets, gts, 0.5);
  REQUIRE(result.pairs.size() == 1);
  CHECK(result.pairs[0].detection == 0);
  CHECK(result.pairs[0].ground_truth == 0);
  CHECK(result.pairs[0].iou == 1.0);
  CHECK(result.unmatched_detections.empty());
  CHECK(result.unmatched_ground_truths.empty());
}

TEST_CASE("greedy_match gives a contested ground truth to the higher score") {
  // Both detections overlap the single GT at iou 90/110; the 0.9-scored one
  // wins although it comes second in the input.
  const std::vector<ScoredBox> dets = {{{0, 1, 10, 10}, 0.7}, {{0, 1, 10, 10}, 0.9}};
  const std::vector<Box> gts = {{0, 0, 10, 10}};
  const MatchResult result = greedy_match(dets, gts, 0.5);
  REQUIRE(result.pairs.size() == 1);
  CHECK(result.pairs[0].detection == 1);
  CHECK(result.pairs[0].ground_truth == 0);
  CHECK(result.unmatched_detections == std::vector<std::size_t>{0});
}

TEST_CASE("greedy_match rejects thresholds outside (0, 1]") {
  CHECK_THROWS_AS(greedy_match({}, {}, 0.0), Error);
  CHECK_THROWS_AS(greedy_match({}, {}, 1.5), Error);
  CHECK_NOTHROW(greedy_match({}, {}, 1.0));
}

TEST_CASE("greedy_match fuzzing: conservation, threshold floor, monotonicity") {
  std::mt19937 rng(11);
  for (int i = 0; i < 300; ++i) {
    std::uniform_int_distribution<int> n_dist(0, 8);
    std::vector<ScoredBox> dets;
    std::vector<Box> gts;
    const int n_dets = n_dist(rng);
    const int n_gts = n_dist(rng);
    std::uniform_int_distribution<int> score_dist(0, 10);
    for (int d = 0; d < n_dets; ++d) {
      dets.push_back({testsupport::random_box(rng), score_dist(rng) / 10.0});
    }
    for (int g = 0; g < n_gts; ++g) gts.push_back(testsupport::random_box(rng));

    const MatchResult low = greedy_match(dets, gts, 0.3);
    const MatchResult high = greedy_match(dets, gts, 0.7);
    CHECK(low.pairs.size() + low.unmatched_detections.size() == dets.size());
    CHECK(low.pairs.size() + low.unmatched_ground_truths.size() == gts.size());
    for (const MatchPair& pair : low.pairs) CHECK(pair.iou >= 0.3);
    for (const MatchPair& pair : high.pairs) CHECK(pair.iou >= 0.7);
    CHECK(high.pairs.size() <= low.pairs.size());

    std::vector<bool> det_seen(dets.size(), false);
    std::vector<bool> gt_seen(gts.size(), false);
    for (const MatchPair& pair : low.pairs) {
      CHECK(!det_seen[pair.detection]);
      CHECK(!gt_seen[pair.ground_truth]);
      det_seen[pair.detection] = true;
      gt_seen[pair.ground_truth] = true;
    }
    for (const std::size_t d : low.unmatched_detections) {
      CHECK(!det_seen[d]);
      det_seen[d] = true;
    }
    for (const std::size_t g : low.unmatched_ground_truths) {
      CHECK(!gt_seen[g]);
      gt_seen[g] = true;
    }
    CHECK(std::all_of(det_seen.begin(), det_seen.end(), [](bool v) { return v; }));
    CHECK(std::all_of(gt_seen.begin(), gt_seen.end(), [](bool v) { return v; }));
  }
}
