// Copyright (C) 2026 The logoseek authors
//
// SPDX-License-Identifier: Apache-2.0
//
// Writes the synthetic demo corpus to disk (datasets as JSONL, images as
// PPM) so the command-line walkthrough in the README has data to chew on.

#include <cstdio>
#include <filesystem>

#include "demo_world.hpp"
#include "logoseek/logoseek.hpp"

using namespace logoseek;
namespace fs = std::filesystem;

int main(int argc, char** argv) {
  const fs::path dir = argc > 1 ? argv[1] : "demo";
  fs::create_directories(dir);

  const demo::DemoWorld world = demo::make_demo_world();
  const ImageLoader loader = demo::demo_loader();
  save_dataset(world.scenes, dir / "scenes.jsonl");
  save_dataset(world.queries, dir / "queries.jsonl");
  for (const Dataset* dataset : {&world.scenes, &world.queries}) {
    for (const ImageRecord& record : dataset->images) {
      save_ppm(loader(record), dir / record.path);
    }
  }

  std::printf("wrote %zu scene and %zu query images under %s\n",
              world.scenes.images.size(), world.queries.images.size(),
              dir.string().c_str());
  std::printf("try:\n");
  std::printf("  logoseek stats %s/scenes.jsonl\n", dir.string().c_str());
  std::printf("  logoseek index %s/scenes.jsonl -o %s/demo.index\n", dir.string().c_str(),
              dir.string().c_str());
  std::printf("  logoseek query %s/demo.index --image %s/scene_0.ppm --region 8,8,48,48\n",
              dir.string().c_str(), dir.string().c_str());
  std::printf(
      "  logoseek evaluate %s/demo.index --ground-truth %s/scenes.jsonl --queries "
      "%s/queries.jsonl -o %s/report.json\n",
      dir.string().c_str(), dir.string().c_str(), dir.string().c_str(),
      dir.string().c_str());
  return 0;
}
