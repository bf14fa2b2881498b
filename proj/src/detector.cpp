#include "flowmotion/detector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "flowmotion/error.hpp"

namespace flowmotion {

void DetectorConfig::validate() const {
  if (!(alpha_s > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha_s must be > 0");
  if (!(alpha_1 >= 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha_1 must be >= 0");
  if (!(alpha_2 >= 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha_2 must be >= 0");
  if (k_min < 1 || k_min > k_max) throw Error(ErrorCode::InvalidArgument, "need 1 <= k_min <= k_max");
  if (threshold_kind == ThresholdKind::Fixed && !(fixed_threshold > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "fixed threshold must be > 0");
  }
  if (interval_kind == IntervalKind::Fixed && (fixed_interval < k_min || fixed_interval > k_max)) {
    throw Error(ErrorCode::InvalidArgument, "fixed interval must lie in [k_min, k_max]");
  }
  grid.validate();
  ransac.validate();
}

ForegroundMask::ForegroundMask(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidArgument, "mask dimensions must be positive");
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

ForegroundMask::ForegroundMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidArgument, "mask dimensions must be positive");
  if (bits_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::InvalidArgument, "mask size does not match width*height");
  }
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t ForegroundMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

int update_interval(const IntervalState& state, double mean_norm, const DetectorConfig& cfg) {
  if (cfg.interval_kind == IntervalKind::Fixed) return cfg.fixed_interval;
  if (!(mean_norm > 0.0)) return cfg.k_max;
  const double raw = std::round(cfg.alpha_s * state.k / mean_norm);
  if (raw >= cfg.k_max) return cfg.k_max;
  if (raw <= cfg.k_min) return cfg.k_min;
  return static_cast<int>(raw);
}

double adaptive_threshold(double mean_norm, const DetectorConfig& cfg) noexcept {
  return cfg.alpha_1 + cfg.alpha_2 * mean_norm;
}

double frame_threshold(double mean_norm, const DetectorConfig& cfg) noexcept {
  return cfg.threshold_kind == ThresholdKind::Fixed ? cfg.fixed_threshold : adaptive_threshold(mean_norm, cfg);
}

namespace {

inline double residual_norm(double du, double dv, ResidualNorm norm) noexcept {
  return norm == ResidualNorm::L2 ? std::sqrt(du * du + dv * dv) : std::abs(du) + std::abs(dv);
}

// The quadratic model evaluated along one row: the y-dependent parts of each
// coefficient collapse to a polynomial in the normalized x.
struct RowPoly {
  double c2u, c1u, c0u;
  double c2v, c1v, c0v;
};

RowPoly row_poly(const QuadraticFlowModel& m, double yn) noexcept {
  const auto& a = m.coeffs[0];
  const auto& b = m.coeffs[1];
  return {a[0], a[2] * yn + a[3], a[1] * yn * yn + a[4] * yn + a[5],
          b[0], b[2] * yn + b[3], b[1] * yn * yn + b[4] * yn + b[5]};
}

void mask_row(const FlowField& field, const QuadraticFlowModel& model, double threshold, ResidualNorm norm, int y,
              std::uint8_t* out) noexcept {
  const double yn = (y - model.norm.offset_y) * model.norm.scale_y;
  const RowPoly p = row_poly(model, yn);
  const auto u = field.u();
  const auto v = field.v();
  const std::size_t base = static_cast<std::size_t>(y) * static_cast<std::size_t>(field.width());
  for (int x = 0; x < field.width(); ++x) {
    const double xn = (x - model.norm.offset_x) * model.norm.scale_x;
    const double bu = (p.c2u * xn + p.c1u) * xn + p.c0u;
    const double bv = (p.c2v * xn + p.c1v) * xn + p.c0v;
    const double d = residual_norm(u[base + x] - bu, v[base + x] - bv, norm);
    out[x] = d > threshold ? 1 : 0;
  }
}

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// Independent stream for sampling; CRA consumes cfg.ransac.seed directly.
std::uint64_t sampling_seed(std::uint64_t seed) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

ForegroundMask extract_mask(const FlowField& field, const QuadraticFlowModel& model, double threshold,
                            ResidualNorm norm) {
  ForegroundMask mask(field.width(), field.height());
  auto bits = mask.bits();
  const int height = field.height();
  const auto width = static_cast<std::size_t>(field.width());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    mask_row(field, model, threshold, norm, y, bits.data() + static_cast<std::size_t>(y) * width);
  }
  return mask;
}

ForegroundMask extract_mask(const FlowField& field, const LinearFlowModel& model, double threshold,
                            ResidualNorm norm) {
  return extract_mask(field, model.as_quadratic(), threshold, norm);
}

ForegroundMask extract_mask(const FlowField& field, const BackgroundModel& model, double threshold,
                            ResidualNorm norm) {
  return std::visit([&](const auto& m) { return extract_mask(field, m, threshold, norm); }, model);
}

namespace reference {

ForegroundMask extract_mask_serial(const FlowField& field, const QuadraticFlowModel& model, double threshold,
                                   ResidualNorm norm) {
  ForegroundMask mask(field.width(), field.height());
  for (int y = 0; y < field.height(); ++y) {
    for (int x = 0; x < field.width(); ++x) {
      const FlowVec bg = evaluate_model(model, {static_cast<double>(x), static_cast<double>(y)});
      const FlowVec f = field.at(x, y);
      mask.set(x, y, residual_norm(f.u - bg.u, f.v - bg.v, norm) > threshold);
    }
  }
  return mask;
}

}  // namespace reference

DetectOutcome detect_frame(const FlowField& field, const IntervalState& state, const DetectorConfig& cfg) {
  cfg.validate();
  if (state.k < cfg.k_min || state.k > cfg.k_max) {
    throw Error(ErrorCode::InvalidArgument, "interval state outside [k_min, k_max]");
  }
  const Domain domain{field.width(), field.height()};
  DetectOutcome out;
  FrameResult& r = out.result;

  auto t0 = std::chrono::steady_clock::now();
  Rng rng(sampling_seed(cfg.ransac.seed));
  const auto samples = sample_points(field, cfg.grid, rng);
  r.sample_count = static_cast<int>(samples.size());
  r.timings.sampling_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto selection = cra_select(samples, domain, cfg.ransac, cfg.model_kind);
  r.timings.cra_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  std::vector<SamplePoint> inliers;
  if (cfg.model_kind == ModelKind::Quadratic) {
    auto fit = cra_refit(samples, selection, domain, cfg.ransac);
    r.model = fit.model;
    r.inlier_ratio = fit.inlier_ratio;
    inliers = std::move(fit.inliers);
  } else {
    auto fit = cra_refit_linear(samples, selection, domain, cfg.ransac);
    r.model = fit.model;
    r.inlier_ratio = fit.inlier_ratio;
    inliers = std::move(fit.inliers);
  }
  r.timings.lsre_ms = ms_since(t0);
  if (inliers.empty()) {
    throw Error(ErrorCode::DegenerateModel, "refit model has no inliers");
  }

  r.mean_background_norm = mean_flow_norm(inliers);
  r.threshold_used = frame_threshold(r.mean_background_norm, cfg);

  t0 = std::chrono::steady_clock::now();
  r.mask = extract_mask(field, r.model, r.threshold_used, cfg.residual_norm);
  r.timings.mask_ms = ms_since(t0);

  r.next_k = update_interval(state, r.mean_background_norm, cfg);
  out.state.k = r.next_k;
  out.state.last_mean_norm = r.mean_background_norm;
  return out;
}

}  // namespace flowmotion
