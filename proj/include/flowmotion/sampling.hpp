#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "flowmotion/flow_model.hpp"
#include "flowmotion/regression.hpp"
#include "flowmotion/sampling_types.hpp"

namespace flowmotion {

using Rng = std::mt19937_64;

struct GridConfig {
  int piece_edge = 100;          // S
  double sample_fraction = 0.5;  // P, in (0, 1]

  void validate() const;
};

struct PieceRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  friend bool operator==(const PieceRect&, const PieceRect&) = default;
};

// Row-major tiling of the image into S×S pieces; the last column/row may be
// narrower/shorter.
std::vector<PieceRect> grid_partition(int width, int height, int piece_edge);

// Number of pieces selected for a given piece count: round-half-up of P·count.
int selected_piece_count(double sample_fraction, int piece_count) noexcept;

// Picks selected_piece_count pieces uniformly without replacement and one
// integer pixel uniformly inside each. Output follows row-major piece order.
// Throws EmptySelection when no piece would be selected.
std::vector<SamplePoint> sample_points(const FlowField& field, const GridConfig& cfg, Rng& rng);

enum class ModelKind { Quadratic, Linear };

struct RansacConfig {
  int iterations = 50;
  double inlier_threshold_px = 1.5;
  std::uint64_t seed = 0;

  void validate() const;
};

inline constexpr int kMinimalSubsetQuadratic = 6;
inline constexpr int kMinimalSubsetLinear = 3;

constexpr int minimal_subset(ModelKind kind) noexcept {
  return kind == ModelKind::Quadratic ? kMinimalSubsetQuadratic : kMinimalSubsetLinear;
}

// Winning hypothesis of the hypothesize-and-verify loop, before the final
// refit. Indices refer to the input sample list and are ascending.
struct CraSelection {
  std::vector<int> inliers;
  int winning_iteration = -1;
  int degenerate_hypotheses = 0;
};

template <typename Model>
struct BasicCraResult {
  Model model;
  std::vector<SamplePoint> inliers;
  double inlier_ratio = 0.0;
  int winning_iteration = -1;
};

using CraResult = BasicCraResult<QuadraticFlowModel>;
using LinearCraResult = BasicCraResult<LinearFlowModel>;

// Runs exactly cfg.iterations rounds: draw a minimal subset of distinct
// samples, fit it exactly, count samples whose residual is within the
// threshold. The hypothesis with the most inliers wins, ties to the lowest
// iteration. Subsets are drawn sequentially from cfg.seed and scored in
// parallel, so the result does not depend on the thread count.
// Throws InsufficientSamples or DegenerateModel (no hypothesis was fittable).
CraSelection cra_select(std::span<const SamplePoint> samples, Domain domain, const RansacConfig& cfg,
                        ModelKind kind = ModelKind::Quadratic);

// cra_select followed by a least-squares refit on the winning inliers. The
// reported inliers are re-derived from the refit model, so every reported
// inlier is within the threshold of the returned model.
CraResult cra_fit(std::span<const SamplePoint> samples, Domain domain, const RansacConfig& cfg);
LinearCraResult cra_fit_linear(std::span<const SamplePoint> samples, Domain domain, const RansacConfig& cfg);

// Refit step shared by cra_fit and callers that time the stages separately.
CraResult cra_refit(std::span<const SamplePoint> samples, const CraSelection& selection, Domain domain,
                    const RansacConfig& cfg);
LinearCraResult cra_refit_linear(std::span<const SamplePoint> samples, const CraSelection& selection,
                                 Domain domain, const RansacConfig& cfg);

// Mean Euclidean norm of the samples' flow vectors. Throws EmptyInput.
double mean_flow_norm(std::span<const SamplePoint> points);

namespace reference {
// Single-threaded hypothesis scoring; must agree exactly with cra_select.
CraSelection cra_select_serial(std::span<const SamplePoint> samples, Domain domain, const RansacConfig& cfg,
                               ModelKind kind = ModelKind::Quadratic);
}  // namespace reference

}  // namespace flowmotion
