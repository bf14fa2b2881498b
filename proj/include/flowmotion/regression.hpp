#pragma once

#include <span>

#include "flowmotion/flow_model.hpp"
#include "flowmotion/sampling_types.hpp"

namespace flowmotion {

// Singular values below this fraction of the largest mark a rank-deficient
// design matrix.
inline constexpr double kRankTolerance = 1e-10;

struct Domain {
  int width = 1;
  int height = 1;
};

// Least-squares quadratic model over the samples, fit in the normalized
// coordinates of `domain`. Both flow components share one SVD of the 6-column
// design matrix. Throws InsufficientSamples (< 6) or SingularDesign.
QuadraticFlowModel lsre_fit(std::span<const SamplePoint> samples, Domain domain);

// Same with the 3-term basis [x, y, 1]. Throws InsufficientSamples (< 3) or
// SingularDesign (collinear samples).
LinearFlowModel lsre_fit_linear(std::span<const SamplePoint> samples, Domain domain);

// Euclidean norm of model(sample.coord) - sample.flow.
double residual(const QuadraticFlowModel& model, const SamplePoint& sample) noexcept;
double residual(const LinearFlowModel& model, const SamplePoint& sample) noexcept;

// Sum of squared residuals; used by tests and diagnostics.
template <typename Model>
double sum_squared_residuals(const Model& model, std::span<const SamplePoint> samples) noexcept {
  double total = 0.0;
  for (const auto& s : samples) {
    const double r = residual(model, s);
    total += r * r;
  }
  return total;
}

}  // namespace flowmotion
