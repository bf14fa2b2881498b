// flowmotion: detect | eval | synth | bench
//
// Exit status: 0 on success, 1 on bad input (unreadable or malformed files,
// unknown presets, bad flags), 2 on internal errors.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flowmotion/config.hpp"
#include "flowmotion/error.hpp"
#include "flowmotion/eval.hpp"
#include "flowmotion/io.hpp"
#include "flowmotion/report.hpp"
#include "flowmotion/sequence.hpp"
#include "flowmotion/synth.hpp"

namespace fs = std::filesystem;
using namespace flowmotion;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitInternal = 2;

std::string frame_name(const char* prefix, int index, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06d%s", prefix, index, ext);
  return buf;
}

bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::UnknownPreset:
    case ErrorCode::InvalidSpec:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::EmptySequence:
    case ErrorCode::MissingFrame:
    case ErrorCode::BadMagic:
    case ErrorCode::TruncatedFile:
    case ErrorCode::NonPositiveDims:
    case ErrorCode::NonFiniteValues:
    case ErrorCode::IoFailure:
    case ErrorCode::BadHeader:
    case ErrorCode::BadPixelValue:
    case ErrorCode::ParseError:
    case ErrorCode::NonMonotoneIndices:
      return true;
    default:
      return false;
  }
}

// Collects output files in a sibling scratch directory and moves them into
// place only on commit, so a failed run leaves nothing behind.
class StagedOutput {
 public:
  explicit StagedOutput(fs::path target) : target_(std::move(target)) {
    const fs::path parent = fs::absolute(target_).parent_path();
    fs::create_directories(parent);
    std::random_device rd;
    for (int attempt = 0; attempt < 16; ++attempt) {
      const fs::path candidate = parent / (".flowmotion-staging-" + std::to_string(rd()));
      if (fs::create_directory(candidate)) {
        staging_ = candidate;
        return;
      }
    }
    throw Error(ErrorCode::IoFailure, "cannot create staging directory next to " + target_.string());
  }
  StagedOutput(const StagedOutput&) = delete;
  StagedOutput& operator=(const StagedOutput&) = delete;
  ~StagedOutput() {
    std::error_code ec;
    if (!staging_.empty()) fs::remove_all(staging_, ec);
  }

  fs::path path(const std::string& name) const { return staging_ / name; }

  void commit() {
    fs::create_directories(target_);
    for (const auto& entry : fs::directory_iterator(staging_)) {
      fs::rename(entry.path(), target_ / entry.path().filename());
    }
  }

 private:
  fs::path target_;
  fs::path staging_;
};

DetectorConfig config_or_default(const std::string& path) {
  return path.empty() ? DetectorConfig{} : load_config(path);
}

int cmd_detect(const std::string& manifest_path, const std::string& config_path, const std::string& out_dir,
               std::uint64_t seed) {
  const auto manifest = io::load_manifest(manifest_path);
  if (manifest.entries.empty()) throw Error(ErrorCode::EmptySequence, "manifest lists no frames");
  const auto cfg = config_or_default(config_path);

  StagedOutput out(out_dir);
  std::ofstream report(out.path("report.txt"));
  if (!report) throw Error(ErrorCode::IoFailure, "cannot write report");
  write_report_header(report, cfg, seed);

  SequenceDetector detector(cfg, seed);
  std::vector<ForegroundMask> preds;
  std::vector<ForegroundMask> gts;
  int fallbacks = 0;
  for (const auto& entry : manifest.entries) {
    auto rec = detector.process(entry.frame_index, io::read_flow(entry.flow_path));
    fallbacks += rec.fallback ? 1 : 0;
    io::write_mask(rec.result.mask, out.path(frame_name("mask", entry.frame_index, ".pgm")));
    write_frame_record(report, rec);
    if (manifest.has_ground_truth()) {
      gts.push_back(io::read_mask(*entry.gt_mask_path));
      preds.push_back(std::move(rec.result.mask));
    }
  }
  if (!gts.empty()) write_score(report, score_sequence(preds, gts));
  report.close();
  if (!report) throw Error(ErrorCode::IoFailure, "report write failed");
  out.commit();

  std::cout << "processed " << manifest.entries.size() << " frames (" << fallbacks << " fallback) -> " << out_dir
            << '\n';
  return 0;
}

// Maps frame index -> mask path for files named <prefix>_<digits>.pgm.
std::map<int, fs::path> indexed_masks(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoFailure, "not a directory: " + dir.string());
  std::map<int, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".pgm") continue;
    const std::string stem = entry.path().stem().string();
    const auto us = stem.rfind('_');
    if (us == std::string::npos || us + 1 == stem.size()) continue;
    const std::string digits = stem.substr(us + 1);
    if (!std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) continue;
    out[std::stoi(digits)] = entry.path();
  }
  return out;
}

int cmd_eval(const std::string& pred_dir, const std::string& gt_dir, const std::string& manifest_path,
             const std::string& out_file) {
  std::map<int, fs::path> gt_paths;
  if (!manifest_path.empty()) {
    const auto manifest = io::load_manifest(manifest_path);
    for (const auto& e : manifest.entries) {
      if (!e.gt_mask_path) {
        throw Error(ErrorCode::MissingFrame, "manifest frame " + std::to_string(e.frame_index) + " has no mask");
      }
      gt_paths[e.frame_index] = *e.gt_mask_path;
    }
  } else {
    gt_paths = indexed_masks(gt_dir);
  }
  if (gt_paths.empty()) throw Error(ErrorCode::EmptySequence, "no ground-truth frames");

  std::vector<ForegroundMask> preds;
  std::vector<ForegroundMask> gts;
  for (const auto& [index, gt_path] : gt_paths) {
    const fs::path pred_path = fs::path(pred_dir) / frame_name("mask", index, ".pgm");
    if (!fs::is_regular_file(pred_path)) {
      throw Error(ErrorCode::MissingFrame, "no prediction for frame " + std::to_string(index));
    }
    preds.push_back(io::read_mask(pred_path));
    gts.push_back(io::read_mask(gt_path));
  }
  const auto score = score_sequence(preds, gts);

  write_score(std::cout, score);
  const fs::path target = out_file.empty() ? fs::path(pred_dir) / "score.txt" : fs::path(out_file);
  std::ofstream out(target);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + target.string());
  write_score(out, score);
  for (std::size_t i = 0; i < score.per_frame_iou.size(); ++i) {
    out << "iou." << std::next(gt_paths.begin(), static_cast<long>(i))->first << '=' << score.per_frame_iou[i] << '\n';
  }
  return 0;
}

int cmd_synth(const std::string& preset, const std::string& out_dir, std::uint64_t seed, int frames, int width,
              int height) {
  synth::PresetOptions opt;
  opt.seed = seed;
  opt.frames = frames;
  opt.width = width;
  opt.height = height;
  const auto suite = synth::benchmark_suite(preset, opt);

  StagedOutput out(out_dir);
  io::SequenceManifest manifest;
  int index = 1;
  for (const auto& sequence : suite) {
    for (const auto& spec : sequence) {
      const auto scene = synth::generate(spec);
      const std::string flow_name = frame_name("flow", index, ".flo");
      const std::string mask_name = frame_name("gt", index, ".pgm");
      io::write_flow(scene.field, out.path(flow_name));
      io::write_mask(scene.truth.mask, out.path(mask_name));
      manifest.entries.push_back({index, flow_name, fs::path(mask_name)});
      ++index;
    }
  }
  io::write_manifest(manifest, out.path("manifest.txt"));
  out.commit();
  std::cout << "wrote " << manifest.entries.size() << " frames of preset '" << preset << "' -> " << out_dir << '\n';
  return 0;
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

int cmd_bench(const std::string& manifest_path, const std::string& config_path, int reps, std::uint64_t seed) {
  if (reps < 1) throw Error(ErrorCode::InvalidArgument, "--reps must be >= 1");
  const auto manifest = io::load_manifest(manifest_path);
  if (manifest.entries.empty()) throw Error(ErrorCode::EmptySequence, "manifest lists no frames");
  const auto cfg = config_or_default(config_path);

  std::vector<FlowField> flows;
  for (const auto& e : manifest.entries) flows.push_back(io::read_flow(e.flow_path));

  std::vector<double> sampling, cra, lsre, mask, total, compose;
  for (int r = 0; r < reps; ++r) {
    SequenceDetector detector(cfg, seed);
    for (std::size_t i = 0; i < flows.size(); ++i) {
      const auto rec = detector.process(manifest.entries[i].frame_index, flows[i]);
      if (rec.fallback) continue;
      const auto& t = rec.result.timings;
      sampling.push_back(t.sampling_ms);
      cra.push_back(t.cra_ms);
      lsre.push_back(t.lsre_ms);
      mask.push_back(t.mask_ms);
      total.push_back(t.total_ms());
      compose.push_back(rec.compose_ms);
    }
  }
  if (total.empty()) throw Error(ErrorCode::EmptySequence, "no frame produced a fit");

  std::printf("frames=%zu\nreps=%d\nwidth=%d\nheight=%d\n", flows.size(), reps, manifest.width, manifest.height);
  std::printf("%-10s %12s\n", "stage", "median_ms");
  const std::pair<const char*, std::vector<double>*> rows[] = {
      {"sampling", &sampling}, {"cra", &cra}, {"lsre", &lsre}, {"mask", &mask}, {"total", &total}, {"compose", &compose}};
  for (const auto& [name, xs] : rows) std::printf("%-10s %12.4f\n", name, median(*xs));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moving-camera motion detection from dense optical flow"};
  app.require_subcommand(1);

  std::string manifest, config, out, preset, pred, gt;
  std::uint64_t seed = 0;
  int reps = 5;
  int frames = 30;
  int width = 854;
  int height = 480;

  auto* detect = app.add_subcommand("detect", "Detect foreground masks over a manifest of flow files");
  detect->add_option("--manifest", manifest, "Sequence manifest")->required();
  detect->add_option("--config", config, "key=value detector configuration");
  detect->add_option("--out", out, "Output directory for masks and report")->required();
  detect->add_option("--seed", seed, "Run seed");

  auto* eval = app.add_subcommand("eval", "Score predicted masks against ground truth");
  eval->add_option("--pred", pred, "Directory of mask_<index>.pgm predictions")->required();
  auto* gt_opt = eval->add_option("--gt", gt, "Directory of <name>_<index>.pgm ground-truth masks");
  auto* eval_manifest = eval->add_option("--manifest", manifest, "Manifest whose third column names ground truth");
  gt_opt->excludes(eval_manifest);
  eval->add_option("--out", out, "Score file (default <pred>/score.txt)");

  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic preset as flow + mask files and a manifest");
  synth_cmd->add_option("--preset", preset, "Preset name")->required();
  synth_cmd->add_option("--out", out, "Output directory")->required();
  synth_cmd->add_option("--seed", seed, "Generator seed");
  synth_cmd->add_option("--frames", frames, "Frames per sequence");
  synth_cmd->add_option("--width", width, "Frame width");
  synth_cmd->add_option("--height", height, "Frame height");

  auto* bench = app.add_subcommand("bench", "Median per-stage timings over repeated runs");
  bench->add_option("--manifest", manifest, "Sequence manifest")->required();
  bench->add_option("--config", config, "key=value detector configuration");
  bench->add_option("--reps", reps, "Repetitions");
  bench->add_option("--seed", seed, "Run seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (*detect) return cmd_detect(manifest, config, out, seed);
    if (*eval) {
      if (gt.empty() && manifest.empty()) {
        std::cerr << "eval: one of --gt or --manifest is required\n";
        return kExitInput;
      }
      return cmd_eval(pred, gt, manifest, out);
    }
    if (*synth_cmd) return cmd_synth(preset, out, seed, frames, width, height);
    if (*bench) return cmd_bench(manifest, config, reps, seed);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_input_error(e.code()) ? kExitInput : kExitInternal;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
