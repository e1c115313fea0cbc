// Copyright 2026 The semmap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "semmap/error.hpp"
#include "semmap/pipeline.hpp"
#include "semmap/scene_synth.hpp"

namespace
{

enum ExitCode { kOk = 0, kConfigError = 1, kDatasetError = 2, kRuntimeError = 3 };

int exit_code_for(semmap::ErrorCode code)
{
  using semmap::ErrorCode;
  switch (code) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::ParseError:
    case ErrorCode::InvalidArgument:
      return kConfigError;
    case ErrorCode::DatasetIncomplete:
    case ErrorCode::MismatchedDatasets:
    case ErrorCode::IoError:
    case ErrorCode::UnknownColor:
    case ErrorCode::DimensionMismatch:
      return kDatasetError;
    default:
      return kRuntimeError;
  }
}

int run_command(
  const std::string & config_path, const std::string & method, const std::string & frames,
  const std::string & out, const std::string & labels)
{
  semmap::KeyValueConfig cfg;
  try {
    cfg = semmap::KeyValueConfig::load(config_path);
  } catch (const semmap::Error & e) {
    throw semmap::Error(semmap::ErrorCode::ConfigInvalid, e.what());
  }
  if (!method.empty()) {
    cfg.set("method", method);
  }
  if (!frames.empty()) {
    cfg.set("frames", frames);
  }
  const std::filesystem::path path(config_path);
  const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : ".";
  semmap::RunConfig config = semmap::RunConfig::from_config(cfg, base);
  if (!out.empty()) {
    config.output = std::filesystem::absolute(out);
  }
  if (!labels.empty()) {
    config.labels_dir = std::filesystem::absolute(labels);
  }

  const semmap::RunResult result = semmap::run(config, std::cerr);
  std::cout << "frames processed: " << result.frames_processed
            << ", skipped: " << result.frames_skipped
            << ", occupied voxels: " << result.map.size() << '\n';
  if (result.metrics) {
    std::cout << "accuracy " << result.metrics->accuracy << ", IoU " << result.metrics->iou << '\n';
  }
  std::cout << "manifest: " << result.manifest.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Stereo semantic terrain mapping"};
  app.require_subcommand(1);

  std::string config_path;
  std::string method;
  std::string frames;
  std::string out;
  std::string labels;
  auto * run_cmd = app.add_subcommand("run", "Fuse a dataset into a semantic voxel map");
  run_cmd->add_option("--config", config_path, "Run configuration file")->required();
  run_cmd->add_option("--method", method, "Labeling pipeline")
    ->check(CLI::IsMember({"cnn", "mlesac"}));
  run_cmd->add_option("--frames", frames, "Inclusive frame index range a..b");
  run_cmd->add_option("--out", out, "Output directory");
  run_cmd->add_option("--labels", labels, "Label rasters paired by timestamp stem");

  std::string manifest_a;
  std::string manifest_b;
  auto * compare_cmd = app.add_subcommand("compare", "Tabulate the metrics of two runs");
  compare_cmd->add_option("manifestA", manifest_a)->required();
  compare_cmd->add_option("manifestB", manifest_b)->required();

  std::string scene_path;
  std::string synth_out;
  auto * synth_cmd = app.add_subcommand("synth", "Render a synthetic dataset");
  synth_cmd->add_option("--scene", scene_path, "Scene description")->required();
  synth_cmd->add_option("--out", synth_out, "Dataset directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (run_cmd->parsed()) {
      return run_command(config_path, method, frames, out, labels);
    }
    if (compare_cmd->parsed()) {
      std::cout << semmap::compare(manifest_a, manifest_b);
      return kOk;
    }
    if (synth_cmd->parsed()) {
      semmap::SyntheticScene scene;
      try {
        scene = semmap::SyntheticScene::load(scene_path);
      } catch (const semmap::Error & e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
      }
      semmap::write_dataset(scene, synth_out);
      std::cout << "wrote " << scene.trajectory.size() << " frames to " << synth_out << '\n';
      return kOk;
    }
  } catch (const semmap::Error & e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
