#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flowmotion/detector.hpp"
#include "flowmotion/flow_model.hpp"

namespace flowmotion::synth {

enum class BlobShape { Rectangle, Ellipse };

// Rectangle: covers pixel centers with x0 <= x < x0 + w and y0 <= y < y0 + h.
// Ellipse: centered at (x0, y0) with semi-axes (w, h).
struct Blob {
  BlobShape shape = BlobShape::Rectangle;
  double x0 = 0.0;
  double y0 = 0.0;
  double w = 0.0;
  double h = 0.0;
  FlowVec relative_flow;  // added to the local background flow

  bool contains(double x, double y) const noexcept;
};

struct SceneSpec {
  int width = 0;
  int height = 0;
  // Background coefficients in the normalized basis of NormTransform::for_domain.
  QuadraticCoeffs background{};
  std::vector<Blob> blobs;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  QuadraticFlowModel background_model() const;
};

struct GroundTruth {
  ForegroundMask mask;
  FlowField clean_field;
};

struct Scene {
  FlowField field;
  GroundTruth truth;
};

// Renders the analytic background plus blobs, then adds i.i.d. Gaussian noise
// to both components. Noise is drawn from per-row streams derived from the
// seed, so the output is independent of the thread count.
// Throws InvalidSpec for bad dimensions, negative sigma or out-of-bounds blobs.
Scene generate(const SceneSpec& spec);

using Sequence = std::vector<SceneSpec>;

struct PresetOptions {
  int width = 854;
  int height = 480;
  int frames = 30;
  std::uint64_t seed = 1;
};

// Named multi-frame scenes: "single-blob", "zooming", "multi-object",
// "background-only", "static". Throws UnknownPreset.
std::vector<Sequence> benchmark_suite(std::string_view preset, const PresetOptions& options = {});

std::vector<std::string> preset_names();

}  // namespace flowmotion::synth
