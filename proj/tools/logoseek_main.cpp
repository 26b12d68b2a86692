// Copyright (C) 2026 The logoseek authors
//
// SPDX-License-Identifier: Apache-2.0
//
// Command-line surface over the logoseek library. Subcommands mirror the
// library operations one-to-one; all outputs are JSON or CSV.
// Exit codes: 0 success, 1 input or validation error, 2 internal error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "logoseek/logoseek.hpp"

namespace {

namespace fs = std::filesystem;
using namespace logoseek;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
}

nlohmann::ordered_json split_counts(const Dataset& dataset) {
  const DatasetStats s = stats(dataset);
  nlohmann::ordered_json j;
  j["n_images"] = s.n_images;
  j["n_rois"] = s.n_rois;
  j["n_brands"] = s.n_brands;
  return j;
}

std::vector<Detection> resolve_detections(const std::string& source, const Dataset& dataset) {
  if (source == "oracle") return oracle_detections(dataset);
  return load_detections(source);
}

Index build_index_cmd(const std::string& dataset_path, const std::string& detections_source,
                      const std::string& extractor, const std::string& image_root,
                      const BuildOptions& options) {
  const Dataset dataset = load_dataset(dataset_path);
  const std::vector<Detection> detections = resolve_detections(detections_source, dataset);
  if (extractor == "baseline") {
    const fs::path root =
        image_root.empty() ? fs::path(dataset_path).parent_path() : fs::path(image_root);
    return build_index(dataset, detections, baseline_extractor(), ppm_loader(root), options);
  }
  return build_index(dataset, detections, load_embeddings(extractor), options);
}

Box parse_region(const std::string& text) {
  const auto fields = split(text, ',');
  if (fields.size() != 4) throw ParseError("--region expects X,Y,W,H");
  return Box{static_cast<int>(parse_int(fields[0], "region x")),
             static_cast<int>(parse_int(fields[1], "region y")),
             static_cast<int>(parse_int(fields[2], "region w")),
             static_cast<int>(parse_int(fields[3], "region h"))};
}

FeatureVector read_feature_file(const std::string& path) {
  const std::string text = read_text_file(path);
  for (const auto& line : split_lines(text)) {
    if (trim(line).empty()) continue;
    FeatureVector feature;
    for (const auto& field : split(trim(line), ',')) {
      feature.values.push_back(parse_double(field, "feature value"));
    }
    return feature;
  }
  throw ParseError("feature file '" + path + "' has no values");
}

QueryExtractor make_query_extractor(const std::string& extractor, const fs::path& image_root) {
  if (extractor == "baseline") {
    return [loader = ppm_loader(image_root)](const ImageRecord& record, std::size_t roi_index) {
      const PixelImage image = loader(record);
      return baseline_descriptor(image, roi_box(record.rois.at(roi_index)));
    };
  }
  return [table = load_embeddings(extractor)](const ImageRecord& record, std::size_t roi_index) {
    const auto it = table.entries.find(RoiKey{record.image_id, roi_index});
    if (it == table.entries.end()) {
      throw ValidationError("no embedding for query image '" + record.image_id + "' roi " +
                            std::to_string(roi_index));
    }
    return it->second;
  };
}

std::string matches_to_csv(const Index& index, const std::vector<RankedMatch>& matches) {
  std::string out = "image_id,x,y,w,h,similarity\n";
  for (const RankedMatch& m : matches) {
    const IndexEntry& e = index.entries[m.entry_index];
    out += e.detection.image_id + "," + std::to_string(e.detection.box.x) + "," +
           std::to_string(e.detection.box.y) + "," + std::to_string(e.detection.box.w) + "," +
           std::to_string(e.detection.box.h) + "," + format_double(m.similarity) + "\n";
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Query-by-example logo retrieval and evaluation toolkit"};
  app.require_subcommand(1);

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Print dataset statistics as JSON");
  std::string stats_dataset;
  stats_cmd->add_option("dataset", stats_dataset, "Dataset JSONL path")->required();

  // import-voc
  auto* voc_cmd = app.add_subcommand("import-voc", "Convert a VOC XML annotation directory");
  std::string voc_dir, voc_out;
  voc_cmd->add_option("directory", voc_dir, "Directory of VOC XML files")->required();
  voc_cmd->add_option("-o,--output", voc_out, "Output dataset JSONL path")->required();

  // split
  auto* split_cmd = app.add_subcommand("split", "Brand exclusion plus holdout split");
  std::string split_dataset, split_train, split_val, split_exclude;
  double holdout_fraction = 0.1;
  split_cmd->add_option("dataset", split_dataset, "Dataset JSONL path")->required();
  split_cmd->add_option("--train", split_train, "Training split output path")->required();
  split_cmd->add_option("--validation", split_val, "Validation split output path")->required();
  split_cmd->add_option("--holdout-fraction", holdout_fraction, "Validation fraction")
      ->check(CLI::Range(0.0, 1.0));
  split_cmd->add_option("--exclude-brands", split_exclude,
                        "File with one brand per line to remove before splitting");

  // merge
  auto* merge_cmd = app.add_subcommand("merge", "Concatenate datasets, rejecting id collisions");
  std::vector<std::string> merge_inputs;
  std::string merge_out;
  merge_cmd->add_option("datasets", merge_inputs, "Dataset JSONL paths")
      ->required()
      ->expected(2, -1);
  merge_cmd->add_option("-o,--output", merge_out, "Output dataset JSONL path")->required();

  // index
  auto* index_cmd = app.add_subcommand("index", "Build a retrieval index");
  std::string index_dataset, index_out, index_detections = "oracle";
  std::string index_extractor = "baseline", index_image_root;
  double min_detector_score = 0.0;
  auto* mds_opt = index_cmd->add_option("--min-detector-score", min_detector_score,
                                        "Drop detections below this score")
                      ->check(CLI::Range(0.0, 1.0));
  index_cmd->add_option("dataset", index_dataset, "Dataset JSONL path")->required();
  index_cmd->add_option("-o,--output", index_out, "Output index path")->required();
  index_cmd->add_option("--detections", index_detections,
                        "'oracle' for ground-truth boxes, or a detections CSV path");
  index_cmd->add_option("--extractor", index_extractor,
                        "'baseline' for the color descriptor, or an embeddings CSV path");
  index_cmd->add_option("--image-root", index_image_root,
                        "Image directory (default: the dataset file's directory)");

  // query
  auto* query_cmd = app.add_subcommand("query", "Rank index entries against one query");
  std::string query_index, query_image, query_region, query_feature, query_out;
  double min_similarity = -1.0;
  unsigned long long top_k = 0;
  query_cmd->add_option("index", query_index, "Index path")->required();
  query_cmd->add_option("--image", query_image, "Query image (PPM)");
  query_cmd->add_option("--region", query_region, "Query box X,Y,W,H within --image");
  query_cmd->add_option("--feature-file", query_feature,
                        "File whose first line holds comma-separated feature values");
  query_cmd->add_option("--min-similarity", min_similarity, "Similarity cutoff")
      ->check(CLI::Range(-1.0, 1.0));
  auto* top_k_opt = query_cmd->add_option("--top-k", top_k, "Keep only the best K matches");
  query_cmd->add_option("-o,--output", query_out, "Output CSV path (default: standard output)");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Run the open-set query protocol");
  std::string eval_index, eval_gt, eval_queries, eval_extractor = "baseline";
  std::string eval_image_root, eval_out, eval_curve_out, eval_brand_out;
  std::string ap_variant = "uninterpolated";
  double eval_iou = 0.5;
  std::vector<double> fppi_grid;
  unsigned long long iterations = 0;
  eval_cmd->add_option("index", eval_index, "Index path")->required();
  eval_cmd->add_option("--ground-truth", eval_gt, "Test dataset JSONL path")->required();
  eval_cmd->add_option("--queries", eval_queries, "Query crop dataset JSONL path")->required();
  eval_cmd->add_option("--iou-threshold", eval_iou, "Match threshold")
      ->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--fppi-grid", fppi_grid, "Operating points for the mean curve")
      ->delimiter(',');
  auto* iter_opt = eval_cmd->add_option("--iterations", iterations, "Query iterations to run");
  eval_cmd->add_option("--ap", ap_variant, "Average precision variant")
      ->check(CLI::IsMember({"uninterpolated", "11point"}));
  eval_cmd->add_option("--extractor", eval_extractor,
                       "'baseline' or an embeddings CSV keyed by query image and roi");
  eval_cmd->add_option("--image-root", eval_image_root,
                       "Query image directory (default: the query file's directory)");
  eval_cmd->add_option("-o,--output", eval_out, "Report JSON path (default: standard output)");
  eval_cmd->add_option("--curve-output", eval_curve_out, "Mean FROC curve CSV path");
  eval_cmd->add_option("--per-brand-output", eval_brand_out, "Per-brand AP CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (stats_cmd->parsed()) {
    const Dataset dataset = load_dataset(stats_dataset);
    std::cout << stats_to_json(stats(dataset)).dump(2) << "\n";
    return 0;
  }

  if (voc_cmd->parsed()) {
    const Dataset dataset = import_voc_xml(voc_dir);
    save_dataset(dataset, voc_out);
    std::cout << split_counts(dataset).dump() << "\n";
    return 0;
  }

  if (split_cmd->parsed()) {
    Dataset dataset = load_dataset(split_dataset);
    if (!split_exclude.empty()) {
      std::set<std::string> brands;
      const std::string text = read_text_file(split_exclude);
      for (const auto& line : split_lines(text)) {
        if (!trim(line).empty()) brands.insert(std::string(trim(line)));
      }
      dataset = exclude_brands(dataset, brands);
    }
    const SplitResult result = holdout_split(dataset, holdout_fraction);
    save_dataset(result.train, split_train);
    save_dataset(result.validation, split_val);
    if (result.train.images.empty()) std::cerr << "warning: train split is empty\n";
    if (result.validation.images.empty()) std::cerr << "warning: validation split is empty\n";
    nlohmann::ordered_json j;
    j["train"] = split_counts(result.train);
    j["validation"] = split_counts(result.validation);
    std::cout << j.dump() << "\n";
    return 0;
  }

  if (merge_cmd->parsed()) {
    Dataset merged = load_dataset(merge_inputs[0]);
    for (std::size_t i = 1; i < merge_inputs.size(); ++i) {
      merged = merge(merged, load_dataset(merge_inputs[i]));
    }
    save_dataset(merged, merge_out);
    std::cout << split_counts(merged).dump() << "\n";
    return 0;
  }

  if (index_cmd->parsed()) {
    BuildOptions options;
    if (mds_opt->count() > 0) options.min_detector_score = min_detector_score;
    const Index index =
        build_index_cmd(index_dataset, index_detections, index_extractor, index_image_root, options);
    save_index(index, index_out);
    nlohmann::ordered_json j;
    j["entries"] = index.entries.size();
    j["dim"] = index.dim;
    std::cout << j.dump() << "\n";
    return 0;
  }

  if (query_cmd->parsed()) {
    const Index index = load_index(query_index);
    const bool has_image = !query_image.empty() || !query_region.empty();
    if (has_image == !query_feature.empty()) {
      throw Error("provide either --image with --region, or --feature-file");
    }
    std::optional<std::size_t> k;
    if (top_k_opt->count() > 0) k = static_cast<std::size_t>(top_k);
    std::vector<RankedMatch> matches;
    if (has_image) {
      if (query_image.empty() || query_region.empty()) {
        throw Error("--image and --region must be given together");
      }
      const PixelImage image = load_ppm(query_image);
      matches = query_from_region(index, image, parse_region(query_region), baseline_extractor(),
                                  min_similarity, k);
    } else {
      matches = query(index, read_feature_file(query_feature), min_similarity, k);
    }
    emit(matches_to_csv(index, matches), query_out);
    return 0;
  }

  if (eval_cmd->parsed()) {
    const Index index = load_index(eval_index);
    const Dataset ground_truth = load_dataset(eval_gt);
    const Dataset queries = load_dataset(eval_queries);
    const fs::path root =
        eval_image_root.empty() ? fs::path(eval_queries).parent_path() : fs::path(eval_image_root);
    ProtocolOptions options;
    options.iou_threshold = eval_iou;
    if (!fppi_grid.empty()) options.fppi_grid = fppi_grid;
    if (iter_opt->count() > 0) options.iterations = static_cast<std::size_t>(iterations);
    options.eleven_point_ap = ap_variant == "11point";
    const EvalReport report = run_open_set_protocol(
        index, ground_truth, queries, make_query_extractor(eval_extractor, root), options);
    emit(report_to_json(report).dump(2) + "\n", eval_out);
    if (!eval_curve_out.empty()) write_text_file(eval_curve_out, mean_curve_to_csv(report));
    if (!eval_brand_out.empty()) write_text_file(eval_brand_out, per_brand_ap_to_csv(report));
    return 0;
  }

  throw InternalError("no subcommand dispatched");
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
