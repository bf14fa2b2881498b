#include "flowmotion/synth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "flowmotion/error.hpp"

namespace flowmotion::synth {

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) noexcept {
  std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool within_bounds(const Blob& b, int width, int height) {
  if (!(b.w > 0.0) || !(b.h > 0.0)) return false;
  if (b.shape == BlobShape::Rectangle) {
    return b.x0 >= 0.0 && b.y0 >= 0.0 && b.x0 + b.w <= width && b.y0 + b.h <= height;
  }
  return b.x0 - b.w >= -0.5 && b.y0 - b.h >= -0.5 && b.x0 + b.w <= width - 0.5 && b.y0 + b.h <= height - 0.5;
}

void validate(const SceneSpec& spec) {
  if (spec.width < 1 || spec.height < 1) throw Error(ErrorCode::InvalidSpec, "scene dimensions must be positive");
  if (!(spec.noise_sigma >= 0.0)) throw Error(ErrorCode::InvalidSpec, "noise sigma must be >= 0");
  for (const auto& row : spec.background) {
    for (double c : row) {
      if (!std::isfinite(c)) throw Error(ErrorCode::InvalidSpec, "background coefficients must be finite");
    }
  }
  for (const auto& b : spec.blobs) {
    if (!within_bounds(b, spec.width, spec.height)) {
      throw Error(ErrorCode::InvalidSpec, "blob lies outside the image");
    }
    if (!std::isfinite(b.relative_flow.u) || !std::isfinite(b.relative_flow.v)) {
      throw Error(ErrorCode::InvalidSpec, "blob relative flow must be finite");
    }
  }
}

}  // namespace

bool Blob::contains(double x, double y) const noexcept {
  if (shape == BlobShape::Rectangle) {
    return x >= x0 && x < x0 + w && y >= y0 && y < y0 + h;
  }
  const double dx = (x - x0) / w;
  const double dy = (y - y0) / h;
  return dx * dx + dy * dy <= 1.0;
}

QuadraticFlowModel SceneSpec::background_model() const {
  QuadraticFlowModel m;
  m.coeffs = background;
  m.norm = NormTransform::for_domain(width, height);
  return m;
}

Scene generate(const SceneSpec& spec) {
  validate(spec);
  const auto model = spec.background_model();
  Scene scene{FlowField(spec.width, spec.height),
              GroundTruth{ForegroundMask(spec.width, spec.height), FlowField(spec.width, spec.height)}};

  auto clean_u = scene.truth.clean_field.u();
  auto clean_v = scene.truth.clean_field.v();
  auto noisy_u = scene.field.u();
  auto noisy_v = scene.field.v();
  auto mask = scene.truth.mask.bits();
  const auto width = static_cast<std::size_t>(spec.width);
  const int height = spec.height;

#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    std::mt19937_64 rng(mix(spec.seed, static_cast<std::uint64_t>(y)));
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int x = 0; x < spec.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x);
      FlowVec f = evaluate_model(model, {static_cast<double>(x), static_cast<double>(y)});
      for (const auto& b : spec.blobs) {
        if (b.contains(x, y)) {
          f.u += b.relative_flow.u;
          f.v += b.relative_flow.v;
          mask[i] = 1;
          break;
        }
      }
      clean_u[i] = static_cast<float>(f.u);
      clean_v[i] = static_cast<float>(f.v);
      if (spec.noise_sigma > 0.0) {
        f.u += spec.noise_sigma * noise(rng);
        f.v += spec.noise_sigma * noise(rng);
      }
      noisy_u[i] = static_cast<float>(f.u);
      noisy_v[i] = static_cast<float>(f.v);
    }
  }
  return scene;
}

namespace {

// Blob that keeps its shape while its center follows the background plus its
// own relative flow, so consecutive frames agree on where each pixel came from.
struct MovingBlob {
  BlobShape shape;
  double w, h;  // full extent for rectangles, semi-axes for ellipses
  double cx, cy;
  std::function<FlowVec(int)> relative;  // relative flow at frame t
};

using CoeffsAt = std::function<QuadraticCoeffs(int)>;

Blob place(const MovingBlob& mb, int t) {
  Blob b;
  b.shape = mb.shape;
  b.w = mb.w;
  b.h = mb.h;
  if (mb.shape == BlobShape::Rectangle) {
    b.x0 = mb.cx - mb.w / 2.0;
    b.y0 = mb.cy - mb.h / 2.0;
  } else {
    b.x0 = mb.cx;
    b.y0 = mb.cy;
  }
  b.relative_flow = mb.relative(t);
  return b;
}

void clamp_center(MovingBlob& mb, int width, int height) {
  const double half_w = mb.shape == BlobShape::Rectangle ? mb.w / 2.0 : mb.w + 0.5;
  const double half_h = mb.shape == BlobShape::Rectangle ? mb.h / 2.0 : mb.h + 0.5;
  // Blobs larger than the frame sit in the middle.
  mb.cx = half_w * 2 > width ? width / 2.0 : std::clamp(mb.cx, half_w, width - half_w);
  mb.cy = half_h * 2 > height ? height / 2.0 : std::clamp(mb.cy, half_h, height - half_h);
}

Sequence build_sequence(const PresetOptions& opt, const CoeffsAt& coeffs, std::vector<MovingBlob> blobs,
                        double sigma) {
  Sequence seq;
  seq.reserve(static_cast<std::size_t>(opt.frames));
  const auto norm = NormTransform::for_domain(opt.width, opt.height);
  for (int t = 0; t < opt.frames; ++t) {
    SceneSpec spec;
    spec.width = opt.width;
    spec.height = opt.height;
    spec.background = coeffs(t);
    spec.noise_sigma = sigma;
    spec.seed = mix(opt.seed, static_cast<std::uint64_t>(t));
    const QuadraticFlowModel bg{spec.background, norm};
    for (auto& mb : blobs) {
      if (t > 0) {
        // Flow maps frame t to t-1, so the new center c satisfies
        // c + bg(c) + rel = previous center. Fixed-point iteration.
        const double px = mb.cx;
        const double py = mb.cy;
        const FlowVec rel = mb.relative(t);
        for (int it = 0; it < 4; ++it) {
          const FlowVec f = evaluate_model(bg, {mb.cx, mb.cy});
          mb.cx = px - f.u - rel.u;
          mb.cy = py - f.v - rel.v;
        }
      }
      clamp_center(mb, opt.width, opt.height);
      spec.blobs.push_back(place(mb, t));
    }
    seq.push_back(std::move(spec));
  }
  return seq;
}

QuadraticCoeffs coeffs_from(std::array<double, 6> u, std::array<double, 6> v) { return {u, v}; }

FlowVec rotating(double magnitude, double phase, double omega, int t) {
  const double a = phase + omega * t;
  return {magnitude * std::cos(a), magnitude * std::sin(a)};
}

// Seed-dependent offset in [-range, range] for initial placement.
double jitter(std::mt19937_64& rng, double range) {
  return std::uniform_real_distribution<double>(-range, range)(rng);
}

// Fast pan with mild second-order distortion; mean flow norm close to 25 px.
CoeffsAt panning_background() {
  return [](int t) {
    const double s = std::sin(t / 5.0);
    const double c = std::cos(t / 7.0);
    return coeffs_from({2.0, 0.5, 1.0, 3.0, 1.5, 20.0 + 2.0 * s}, {0.5, 1.5, 1.0, 1.0, 2.5, 8.0 + 1.0 * c});
  };
}

Sequence single_blob(const PresetOptions& opt) {
  std::mt19937_64 rng(mix(opt.seed, 0xb10bULL));
  MovingBlob blob{BlobShape::Rectangle, 80.0, 80.0, 0.22 * opt.width + jitter(rng, 10.0),
                  0.25 * opt.height + jitter(rng, 10.0), [](int) { return FlowVec{-26.0, -15.0}; }};
  return build_sequence(opt, panning_background(), {blob}, 0.3);
}

// Zoom-in whose linear terms grow every frame, on top of a second-order
// distortion a linear model cannot absorb.
Sequence zooming(const PresetOptions& opt) {
  const double half_w = (opt.width - 1) / 2.0;
  const double half_h = (opt.height - 1) / 2.0;
  const int frames = std::max(opt.frames - 1, 1);
  CoeffsAt coeffs = [=](int t) {
    const double zoom = 0.004 + 0.02 * t / frames;
    return coeffs_from({9.0, -3.0, 6.0, zoom * half_w, 0.5, 3.0}, {-2.0, 7.0, 5.0, 0.3, zoom * half_h, 2.0});
  };
  std::mt19937_64 rng(mix(opt.seed, 0x200aULL));
  const double phase = jitter(rng, 3.14159);
  MovingBlob blob{BlobShape::Rectangle, 90.0, 70.0, opt.width * (0.5 + 0.18 * std::sin(phase)),
                  opt.height * (0.5 - 0.25 * std::cos(phase)),
                  [phase](int t) { return rotating(30.0, phase, 0.2, t); }};
  return build_sequence(opt, coeffs, {blob}, 0.3);
}

Sequence multi_object(const PresetOptions& opt) {
  CoeffsAt coeffs = [](int t) {
    return coeffs_from({1.0, 0.5, 0.5, 1.5, 0.5, 6.0 * std::sin(t / 4.0)},
                       {0.5, 1.0, 0.5, 0.5, 1.5, 6.0 * std::cos(t / 5.0)});
  };
  std::mt19937_64 rng(mix(opt.seed, 0x3b10ULL));
  const double w = opt.width;
  const double h = opt.height;
  std::vector<MovingBlob> blobs{
      {BlobShape::Rectangle, 70.0, 70.0, 0.2 * w + jitter(rng, 10.0), 0.5 * h + jitter(rng, 10.0),
       [](int t) { return rotating(26.0, 0.0, 0.35, t); }},
      {BlobShape::Ellipse, 40.0, 30.0, 0.5 * w + jitter(rng, 10.0), 0.5 * h + jitter(rng, 10.0),
       [](int t) { return rotating(26.0, 0.4, 0.35, t); }},
      {BlobShape::Rectangle, 60.0, 90.0, 0.8 * w + jitter(rng, 10.0), 0.5 * h + jitter(rng, 10.0),
       [](int t) { return rotating(26.0, 0.8, 0.35, t); }},
  };
  return build_sequence(opt, coeffs, std::move(blobs), 0.3);
}

Sequence background_only(const PresetOptions& opt) { return build_sequence(opt, panning_background(), {}, 0.3); }

Sequence static_scene(const PresetOptions& opt) {
  return build_sequence(opt, [](int) { return QuadraticCoeffs{}; }, {}, 0.0);
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"single-blob", "zooming", "multi-object", "background-only", "static"};
}

std::vector<Sequence> benchmark_suite(std::string_view preset, const PresetOptions& options) {
  if (options.width < 1 || options.height < 1 || options.frames < 1) {
    throw Error(ErrorCode::InvalidSpec, "preset dimensions and frame count must be positive");
  }
  if (preset == "single-blob") return {single_blob(options)};
  if (preset == "zooming") return {zooming(options)};
  if (preset == "multi-object") return {multi_object(options)};
  if (preset == "background-only") return {background_only(options)};
  if (preset == "static") return {static_scene(options)};
  throw Error(ErrorCode::UnknownPreset, "unknown preset '" + std::string(preset) + "'");
}

}  // namespace flowmotion::synth
