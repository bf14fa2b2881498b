#include "flowmotion/flow_model.hpp"

#include <algorithm>
#include <cmath>

#include "flowmotion/error.hpp"

namespace flowmotion {

namespace {

bool all_finite(std::span<const float> values) {
  return std::all_of(values.begin(), values.end(), [](float x) { return std::isfinite(x); });
}

}  // namespace

FlowField::FlowField(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidArgument, "flow field dimensions must be positive");
  }
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  u_.assign(n, 0.0f);
  v_.assign(n, 0.0f);
}

FlowField::FlowField(int width, int height, std::vector<float> u, std::vector<float> v)
    : width_(width), height_(height), u_(std::move(u)), v_(std::move(v)) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidArgument, "flow field dimensions must be positive");
  }
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (u_.size() != n || v_.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "flow plane size does not match width*height");
  }
  check_finite();
}

void FlowField::check_finite() const {
  if (!all_finite(u_) || !all_finite(v_)) {
    throw Error(ErrorCode::NonFiniteValues, "flow field contains NaN or infinite values");
  }
}

MonomialVector monomial_vector(PixelCoord p) noexcept {
  return {p.x * p.x, p.y * p.y, p.x * p.y, p.x, p.y, 1.0};
}

NormTransform NormTransform::for_domain(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidArgument, "domain dimensions must be positive");
  }
  const double half_w = std::max((width - 1) / 2.0, 0.5);
  const double half_h = std::max((height - 1) / 2.0, 0.5);
  return {(width - 1) / 2.0, (height - 1) / 2.0, 1.0 / half_w, 1.0 / half_h};
}

bool QuadraticFlowModel::is_finite() const noexcept {
  for (const auto& row : coeffs) {
    for (double c : row) {
      if (!std::isfinite(c)) return false;
    }
  }
  return true;
}

bool LinearFlowModel::is_finite() const noexcept {
  for (const auto& row : coeffs) {
    for (double c : row) {
      if (!std::isfinite(c)) return false;
    }
  }
  return true;
}

QuadraticFlowModel LinearFlowModel::as_quadratic() const noexcept {
  QuadraticFlowModel q;
  q.norm = norm;
  for (int r = 0; r < 2; ++r) {
    q.coeffs[r] = {0.0, 0.0, 0.0, coeffs[r][0], coeffs[r][1], coeffs[r][2]};
  }
  return q;
}

FlowVec evaluate_model(const QuadraticFlowModel& m, PixelCoord p) noexcept {
  const auto mono = monomial_vector(m.norm.apply(p));
  FlowVec out;
  for (int j = 0; j < 6; ++j) {
    out.u += m.coeffs[0][j] * mono[j];
    out.v += m.coeffs[1][j] * mono[j];
  }
  return out;
}

FlowVec evaluate_linear(const LinearFlowModel& m, PixelCoord p) noexcept {
  const auto q = m.norm.apply(p);
  return {m.coeffs[0][0] * q.x + m.coeffs[0][1] * q.y + m.coeffs[0][2],
          m.coeffs[1][0] * q.x + m.coeffs[1][1] * q.y + m.coeffs[1][2]};
}

}  // namespace flowmotion
