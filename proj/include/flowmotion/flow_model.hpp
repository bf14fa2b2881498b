#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace flowmotion {

struct FlowVec {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const FlowVec&, const FlowVec&) = default;
};

struct PixelCoord {
  double x = 0.0;
  double y = 0.0;
};

// Dense displacement field stored as two row-major planes. Values are
// float to match the interchange format; all arithmetic happens in double.
class FlowField {
 public:
  FlowField() = default;
  // Zero-filled field. Throws InvalidArgument unless width, height >= 1.
  FlowField(int width, int height);
  // Takes ownership of the planes. Throws InvalidArgument on size mismatch
  // and NonFiniteValues if any value is NaN or infinite.
  FlowField(int width, int height, std::vector<float> u, std::vector<float> v);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return u_.size(); }
  bool empty() const noexcept { return u_.empty(); }

  std::span<const float> u() const noexcept { return u_; }
  std::span<const float> v() const noexcept { return v_; }
  std::span<float> u() noexcept { return u_; }
  std::span<float> v() noexcept { return v_; }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }
  FlowVec at(int x, int y) const noexcept {
    const auto i = index(x, y);
    return {u_[i], v_[i]};
  }
  void set(int x, int y, FlowVec f) noexcept {
    const auto i = index(x, y);
    u_[i] = static_cast<float>(f.u);
    v_[i] = static_cast<float>(f.v);
  }

  // Re-validates the finiteness invariant after in-place mutation.
  void check_finite() const;

  friend bool operator==(const FlowField&, const FlowField&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> u_;
  std::vector<float> v_;
};

// [x², y², xy, x, y, 1]
using MonomialVector = std::array<double, 6>;

MonomialVector monomial_vector(PixelCoord p) noexcept;

// Affine map from pixel coordinates of a width×height image onto [-1, 1]².
struct NormTransform {
  double offset_x = 0.0;
  double offset_y = 0.0;
  double scale_x = 1.0;
  double scale_y = 1.0;

  static NormTransform for_domain(int width, int height);
  static NormTransform identity() { return {}; }

  PixelCoord apply(PixelCoord p) const noexcept {
    return {(p.x - offset_x) * scale_x, (p.y - offset_y) * scale_y};
  }
};

using QuadraticCoeffs = std::array<std::array<double, 6>, 2>;
using LinearCoeffs = std::array<std::array<double, 3>, 2>;

// Background flow as a quadratic polynomial of (normalized) pixel
// coordinates. Row 0 produces u, row 1 produces v; columns follow the
// monomial order of monomial_vector.
struct QuadraticFlowModel {
  QuadraticCoeffs coeffs{};
  NormTransform norm = NormTransform::identity();

  bool is_finite() const noexcept;
};

// Affine ablation model over [x, y, 1] in the same normalized frame.
struct LinearFlowModel {
  LinearCoeffs coeffs{};
  NormTransform norm = NormTransform::identity();

  bool is_finite() const noexcept;
  // Same field expressed with zero second-order terms.
  QuadraticFlowModel as_quadratic() const noexcept;
};

FlowVec evaluate_model(const QuadraticFlowModel& m, PixelCoord p) noexcept;
FlowVec evaluate_linear(const LinearFlowModel& m, PixelCoord p) noexcept;

inline FlowVec evaluate(const QuadraticFlowModel& m, PixelCoord p) noexcept { return evaluate_model(m, p); }
inline FlowVec evaluate(const LinearFlowModel& m, PixelCoord p) noexcept { return evaluate_linear(m, p); }

}  // namespace flowmotion
