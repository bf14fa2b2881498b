#include "flowmotion/regression.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "flowmotion/error.hpp"

namespace flowmotion {

namespace {

template <int Terms>
using Design = Eigen::Matrix<double, Eigen::Dynamic, Terms>;

template <int Terms>
Eigen::Matrix<double, Terms, 1> basis_row(PixelCoord q);

template <>
Eigen::Matrix<double, 6, 1> basis_row<6>(PixelCoord q) {
  const auto m = monomial_vector(q);
  return Eigen::Matrix<double, 6, 1>(m.data());
}

template <>
Eigen::Matrix<double, 3, 1> basis_row<3>(PixelCoord q) {
  return {q.x, q.y, 1.0};
}

// Solves min ||A c - b|| for both flow components with one SVD of A.
// Returns a Terms×2 matrix whose columns are the u and v coefficients.
template <int Terms>
Eigen::Matrix<double, Terms, 2> solve_least_squares(std::span<const SamplePoint> samples, const NormTransform& norm) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (n < Terms) {
    throw Error(ErrorCode::InsufficientSamples,
                "need at least " + std::to_string(Terms) + " samples, got " + std::to_string(n));
  }
  Design<Terms> a(n, Terms);
  Eigen::Matrix<double, Eigen::Dynamic, 2> b(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    a.row(i) = basis_row<Terms>(norm.apply(s.coord)).transpose();
    b(i, 0) = s.flow.u;
    b(i, 1) = s.flow.v;
  }

  Eigen::JacobiSVD<Design<Terms>> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double largest = sv(0);
  if (!(largest > 0.0) || sv(Terms - 1) < kRankTolerance * largest) {
    throw Error(ErrorCode::SingularDesign, "design matrix is rank deficient (degenerate sample geometry)");
  }
  return svd.solve(b);
}

}  // namespace

QuadraticFlowModel lsre_fit(std::span<const SamplePoint> samples, Domain domain) {
  QuadraticFlowModel model;
  model.norm = NormTransform::for_domain(domain.width, domain.height);
  const auto c = solve_least_squares<6>(samples, model.norm);
  for (int j = 0; j < 6; ++j) {
    model.coeffs[0][j] = c(j, 0);
    model.coeffs[1][j] = c(j, 1);
  }
  if (!model.is_finite()) {
    throw Error(ErrorCode::SingularDesign, "least-squares solution is not finite");
  }
  return model;
}

LinearFlowModel lsre_fit_linear(std::span<const SamplePoint> samples, Domain domain) {
  LinearFlowModel model;
  model.norm = NormTransform::for_domain(domain.width, domain.height);
  const auto c = solve_least_squares<3>(samples, model.norm);
  for (int j = 0; j < 3; ++j) {
    model.coeffs[0][j] = c(j, 0);
    model.coeffs[1][j] = c(j, 1);
  }
  if (!model.is_finite()) {
    throw Error(ErrorCode::SingularDesign, "least-squares solution is not finite");
  }
  return model;
}

double residual(const QuadraticFlowModel& model, const SamplePoint& sample) noexcept {
  const auto f = evaluate_model(model, sample.coord);
  return std::hypot(f.u - sample.flow.u, f.v - sample.flow.v);
}

double residual(const LinearFlowModel& model, const SamplePoint& sample) noexcept {
  const auto f = evaluate_linear(model, sample.coord);
  return std::hypot(f.u - sample.flow.u, f.v - sample.flow.v);
}

}  // namespace flowmotion
