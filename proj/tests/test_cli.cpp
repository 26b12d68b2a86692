// Copyright (C) 2026 The logoseek authors
//
// SPDX-License-Identifier: Apache-2.0
//
// Drives the installed binary as a subprocess. LOGOSEEK_BIN_PATH is injected
// by the build; fixtures live in a per-process temp directory.

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <catch2/catch_amalgamated.hpp>

#include "logoseek/logoseek.hpp"
#include "support.hpp"

using namespace logoseek;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path workspace_dir() {
  static const fs::path dir = [] {
    const fs::path d =
        fs::temp_directory_path() / ("logoseek_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CliResult run_cli(const std::string& args) {
  const fs::path out_path = workspace_dir() / "stdout.txt";
  const fs::path err_path = workspace_dir() / "stderr.txt";
  const std::string command = std::string(LOGOSEEK_BIN_PATH) + " " + args + " >" +
                              out_path.string() + " 2>" + err_path.string();
  const int status = std::system(command.c_str());
  CliResult result;
  if (WIFEXITED(status)) result.code = WEXITSTATUS(status);
  result.out = read_text_file(out_path);
  result.err = read_text_file(err_path);
  return result;
}

/// Writes the color world to disk once: datasets as JSONL, images as PPM.
struct Workspace {
  fs::path dir;
  fs::path scenes;
  fs::path queries;
  testsupport::ColorWorld world;
};

const Workspace& workspace() {
  static const Workspace ws = [] {
    Workspace w;
    w.dir = workspace_dir();
    w.world = testsupport::make_color_world(6, 3, 3, 2);
    w.scenes = w.dir / "scenes.jsonl";
    w.queries = w.dir / "queries.jsonl";
    save_dataset(w.world.scenes, w.scenes);
    save_dataset(w.world.queries, w.queries);
    const ImageLoader loader = testsupport::color_world_loader();
    for (const Dataset* dataset : {&w.world.scenes, &w.world.queries}) {
      for (const ImageRecord& record : dataset->images) {
        save_ppm(loader(record), w.dir / record.path);
      }
    }
    return w;
  }();
  return ws;
}

std::string q(const fs::path& path) { return path.string(); }

}  // namespace

TEST_CASE("help exits 0") {
  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("query --help").code == 0);
}

TEST_CASE("unknown subcommand exits 1") {
  CHECK(run_cli("frobnicate").code == 1);
}

TEST_CASE("stats prints headline counts for a valid dataset") {
  const CliResult r = run_cli("stats " + q(workspace().scenes));
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("n_images") == 6);
  CHECK(j.at("n_rois") == 18);
  CHECK(j.at("n_brands") == 3);
  CHECK(j.contains("rois_per_image_histogram"));
}

TEST_CASE("stats on a missing file exits 1 with a diagnostic") {
  const CliResult r = run_cli("stats " + q(workspace().dir / "nope.jsonl"));
  CHECK(r.code == 1);
  CHECK(!r.err.empty());
}

TEST_CASE("split partitions the dataset into the two output files") {
  const Workspace& ws = workspace();
  const fs::path train = ws.dir / "train.jsonl";
  const fs::path val = ws.dir / "val.jsonl";
  const CliResult r = run_cli("split " + q(ws.scenes) + " --train " + q(train) +
                              " --validation " + q(val) + " --holdout-fraction 0.5");
  REQUIRE(r.code == 0);
  const Dataset t = load_dataset(train);
  const Dataset v = load_dataset(val);
  CHECK(t.images.size() + v.images.size() == ws.world.scenes.images.size());
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("train").at("n_images") == t.images.size());
  CHECK(j.at("validation").at("n_images") == v.images.size());
}

TEST_CASE("split warns when the exclusion list empties the dataset") {
  const Workspace& ws = workspace();
  const fs::path excl = ws.dir / "exclude_all.txt";
  write_text_file(excl, "brand_00\nbrand_01\nbrand_02\n");
  const CliResult r = run_cli("split " + q(ws.scenes) + " --train " + q(ws.dir / "te.jsonl") +
                              " --validation " + q(ws.dir / "ve.jsonl") +
                              " --exclude-brands " + q(excl));
  REQUIRE(r.code == 0);
  CHECK(r.err.find("warning") != std::string::npos);
  CHECK(load_dataset(ws.dir / "te.jsonl").images.empty());
  CHECK(load_dataset(ws.dir / "ve.jsonl").images.empty());
}

TEST_CASE("merge concatenates disjoint datasets and rejects collisions") {
  const Workspace& ws = workspace();
  Dataset a, b;
  a.name = "a";
  b.name = "b";
  for (int i = 0; i < 2; ++i) {
    ImageRecord r;
    r.image_id = "ma" + std::to_string(i);
    r.path = r.image_id + ".ppm";
    r.width = r.height = 10;
    a.images.push_back(r);
  }
  for (int i = 0; i < 3; ++i) {
    ImageRecord r;
    r.image_id = "mb" + std::to_string(i);
    r.path = r.image_id + ".ppm";
    r.width = r.height = 10;
    b.images.push_back(r);
  }
  save_dataset(a, ws.dir / "ma.jsonl");
  save_dataset(b, ws.dir / "mb.jsonl");
  const CliResult ok = run_cli("merge " + q(ws.dir / "ma.jsonl") + " " + q(ws.dir / "mb.jsonl") +
                               " -o " + q(ws.dir / "merged.jsonl"));
  REQUIRE(ok.code == 0);
  CHECK(load_dataset(ws.dir / "merged.jsonl").images.size() == 5);

  const CliResult clash = run_cli("merge " + q(ws.dir / "ma.jsonl") + " " + q(ws.dir / "ma.jsonl") +
                                  " -o " + q(ws.dir / "clash.jsonl"));
  CHECK(clash.code == 1);
  CHECK(clash.err.find("duplicate") != std::string::npos);
}

TEST_CASE("index builds deterministically from oracle detections") {
  const Workspace& ws = workspace();
  const fs::path idx1 = ws.dir / "scene1.index";
  const fs::path idx2 = ws.dir / "scene2.index";
  const CliResult r1 = run_cli("index " + q(ws.scenes) + " -o " + q(idx1));
  REQUIRE(r1.code == 0);
  const auto j = nlohmann::json::parse(r1.out);
  CHECK(j.at("entries") == 18);
  CHECK(j.at("dim") == kDescriptorDim);
  const CliResult r2 = run_cli("index " + q(ws.scenes) + " -o " + q(idx2));
  REQUIRE(r2.code == 0);
  CHECK(read_text_file(idx1) == read_text_file(idx2));
}

TEST_CASE("index with detections naming an unknown image exits 1") {
  const Workspace& ws = workspace();
  const fs::path bad = ws.dir / "bad_dets.csv";
  write_text_file(bad, "image_id,x,y,w,h,score\nghost,0,0,5,5,1\n");
  const CliResult r = run_cli("index " + q(ws.scenes) + " --detections " + q(bad) + " -o " +
                              q(ws.dir / "bad.index"));
  CHECK(r.code == 1);
  CHECK(r.err.find("ghost") != std::string::npos);
}

TEST_CASE("query with an indexed crop ranks it first at similarity 1") {
  const Workspace& ws = workspace();
  const fs::path idx = ws.dir / "query.index";
  REQUIRE(run_cli("index " + q(ws.scenes) + " -o " + q(idx)).code == 0);
  const ImageRecord& record = ws.world.scenes.images[0];
  const RoI& roi = record.rois[0];
  const std::string region = std::to_string(roi.x) + "," + std::to_string(roi.y) + "," +
                             std::to_string(roi.w) + "," + std::to_string(roi.h);
  const CliResult r = run_cli("query " + q(idx) + " --image " + q(ws.dir / record.path) +
                              " --region " + region + " --top-k 5");
  REQUIRE(r.code == 0);
  const auto lines = split_lines(r.out);
  REQUIRE(lines.size() >= 2);
  CHECK(lines[0] == "image_id,x,y,w,h,similarity");
  CHECK(lines.size() <= 6);
  const auto fields = split(lines[1], ',');
  REQUIRE(fields.size() == 6);
  CHECK(parse_double(fields[5], "similarity") > 0.999999);
}

TEST_CASE("query accepts a raw feature row") {
  const Workspace& ws = workspace();
  const fs::path idx = ws.dir / "feat.index";
  REQUIRE(run_cli("index " + q(ws.scenes) + " -o " + q(idx)).code == 0);
  const ImageRecord& record = ws.world.scenes.images[1];
  const FeatureVector feature = baseline_descriptor(
      testsupport::color_world_loader()(record), roi_box(record.rois[0]));
  std::string row;
  for (std::size_t k = 0; k < feature.dim(); ++k) {
    if (k) row += ",";
    row += format_double(feature[k]);
  }
  const fs::path feature_file = ws.dir / "feature.csv";
  write_text_file(feature_file, row + "\n");
  const CliResult r = run_cli("query " + q(idx) + " --feature-file " + q(feature_file) +
                              " --min-similarity 0.999");
  REQUIRE(r.code == 0);
  const auto lines = split_lines(r.out);
  REQUIRE(lines.size() >= 2);
  CHECK(parse_double(split(lines[1], ',')[5], "similarity") > 0.999999);
  // Ties at similarity 1 may rank a pixel-identical logo from another scene
  // first, but the crop's own region must be among the reported rows.
  const RoI& roi = record.rois[0];
  const std::string own_prefix = record.image_id + "," + std::to_string(roi.x) + "," +
                                 std::to_string(roi.y) + "," + std::to_string(roi.w) + "," +
                                 std::to_string(roi.h) + ",";
  bool found_own = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].starts_with(own_prefix)) found_own = true;
  }
  CHECK(found_own);
}

TEST_CASE("query rejects an out-of-range min-similarity") {
  const Workspace& ws = workspace();
  const fs::path idx = ws.dir / "range.index";
  REQUIRE(run_cli("index " + q(ws.scenes) + " -o " + q(idx)).code == 0);
  const CliResult r = run_cli("query " + q(idx) + " --feature-file /dev/null" +
                              " --min-similarity 2.0");
  CHECK(r.code == 1);
  CHECK(!r.err.empty());
}

TEST_CASE("evaluate reports map 1 on the perfect fixture and writes the CSVs") {
  const Workspace& ws = workspace();
  const fs::path idx = ws.dir / "eval.index";
  REQUIRE(run_cli("index " + q(ws.scenes) + " -o " + q(idx)).code == 0);
  const fs::path report_path = ws.dir / "report.json";
  const fs::path curve_path = ws.dir / "curve.csv";
  const fs::path brand_path = ws.dir / "brands.csv";
  const CliResult r = run_cli("evaluate " + q(idx) + " --ground-truth " + q(ws.scenes) +
                              " --queries " + q(ws.queries) + " -o " + q(report_path) +
                              " --curve-output " + q(curve_path) + " --per-brand-output " +
                              q(brand_path));
  REQUIRE(r.code == 0);
  const auto report = nlohmann::json::parse(read_text_file(report_path));
  CHECK(report.at("map") == 1.0);
  CHECK(report.at("map_std") == 0.0);
  CHECK(report.at("n_iterations") == 2);
  const std::string curve_text = read_text_file(curve_path);
  const auto curve_lines = split_lines(curve_text);
  REQUIRE(!curve_lines.empty());
  CHECK(curve_lines[0] == "fppi,rate,std");
  CHECK(curve_lines.size() == 6);
  const std::string brand_text = read_text_file(brand_path);
  const auto brand_lines = split_lines(brand_text);
  CHECK(brand_lines.size() == 4);
  CHECK(brand_lines[0] == "brand,ap");
}

TEST_CASE("evaluate with an empty query set exits 1") {
  const Workspace& ws = workspace();
  const fs::path idx = ws.dir / "emptyq.index";
  REQUIRE(run_cli("index " + q(ws.scenes) + " -o " + q(idx)).code == 0);
  const fs::path no_queries = ws.dir / "no_queries.jsonl";
  write_text_file(no_queries, "");
  const CliResult r = run_cli("evaluate " + q(idx) + " --ground-truth " + q(ws.scenes) +
                              " --queries " + q(no_queries));
  CHECK(r.code == 1);
  CHECK(!r.err.empty());
}

TEST_CASE("import-voc converts annotations, naming conventions included") {
  const Workspace& ws = workspace();
  const fs::path voc = ws.dir / "voc";
  fs::create_directories(voc);
  write_text_file(voc / "scene1.xml",
                  "<annotation><filename>scene1.jpg</filename>"
                  "<size><width>100</width><height>80</height></size>"
                  "<object><name>nike-text</name><bndbox><xmin>10</xmin><ymin>10</ymin>"
                  "<xmax>30</xmax><ymax>40</ymax></bndbox></object></annotation>");
  write_text_file(voc / "scene2.xml",
                  "<annotation><filename>scene2.jpg</filename>"
                  "<size><width>100</width><height>80</height></size>"
                  "<object><name>nike</name><bndbox><xmin>5</xmin><ymin>5</ymin>"
                  "<xmax>25</xmax><ymax>25</ymax></bndbox></object></annotation>");
  const fs::path out = ws.dir / "voc.jsonl";
  const CliResult r = run_cli("import-voc " + q(voc) + " -o " + q(out));
  REQUIRE(r.code == 0);
  const Dataset dataset = load_dataset(out);
  REQUIRE(dataset.images.size() == 2);
  CHECK(dataset.images[0].rois[0].label.brand == "nike");
  CHECK(dataset.images[0].rois[0].label.kind == LogoKind::textual);
  CHECK(dataset.images[0].rois[0].x == 10);
  CHECK(dataset.images[0].rois[0].w == 20);
  CHECK(dataset.images[0].rois[0].h == 30);
  CHECK(dataset.images[1].rois[0].label.kind == LogoKind::graphical);

  const fs::path empty_voc = ws.dir / "voc_empty";
  fs::create_directories(empty_voc);
  const CliResult empty = run_cli("import-voc " + q(empty_voc) + " -o " + q(ws.dir / "e.jsonl"));
  REQUIRE(empty.code == 0);
  CHECK(load_dataset(ws.dir / "e.jsonl").images.empty());
}
