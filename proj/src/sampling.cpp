#include "flowmotion/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "flowmotion/error.hpp"

namespace flowmotion {

void GridConfig::validate() const {
  if (piece_edge < 1) throw Error(ErrorCode::InvalidArgument, "piece edge must be >= 1");
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "sample fraction must lie in (0, 1]");
  }
}

void RansacConfig::validate() const {
  if (iterations < 1) throw Error(ErrorCode::InvalidArgument, "RANSAC iterations must be >= 1");
  if (!(inlier_threshold_px > 0.0)) throw Error(ErrorCode::InvalidArgument, "inlier threshold must be > 0");
}

std::vector<PieceRect> grid_partition(int width, int height, int piece_edge) {
  if (width < 1 || height < 1 || piece_edge < 1) {
    throw Error(ErrorCode::InvalidArgument, "grid dimensions must be positive");
  }
  std::vector<PieceRect> pieces;
  const int cols = (width + piece_edge - 1) / piece_edge;
  const int rows = (height + piece_edge - 1) / piece_edge;
  pieces.reserve(static_cast<std::size_t>(cols) * static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    const int y = r * piece_edge;
    for (int c = 0; c < cols; ++c) {
      const int x = c * piece_edge;
      pieces.push_back({x, y, std::min(piece_edge, width - x), std::min(piece_edge, height - y)});
    }
  }
  return pieces;
}

int selected_piece_count(double sample_fraction, int piece_count) noexcept {
  return static_cast<int>(std::floor(sample_fraction * piece_count + 0.5));
}

std::vector<SamplePoint> sample_points(const FlowField& field, const GridConfig& cfg, Rng& rng) {
  cfg.validate();
  const auto pieces = grid_partition(field.width(), field.height(), cfg.piece_edge);
  const int count = selected_piece_count(cfg.sample_fraction, static_cast<int>(pieces.size()));
  if (count <= 0) {
    throw Error(ErrorCode::EmptySelection, "sample fraction selects no grid piece");
  }

  std::vector<PieceRect> chosen;
  chosen.reserve(static_cast<std::size_t>(count));
  std::sample(pieces.begin(), pieces.end(), std::back_inserter(chosen), count, rng);

  std::vector<SamplePoint> samples;
  samples.reserve(chosen.size());
  for (const auto& piece : chosen) {
    std::uniform_int_distribution<int> dx(0, piece.width - 1);
    std::uniform_int_distribution<int> dy(0, piece.height - 1);
    const int x = piece.x + dx(rng);
    const int y = piece.y + dy(rng);
    samples.push_back({{static_cast<double>(x), static_cast<double>(y)}, field.at(x, y)});
  }
  return samples;
}

double mean_flow_norm(std::span<const SamplePoint> points) {
  if (points.empty()) throw Error(ErrorCode::EmptyInput, "mean flow norm of an empty point set");
  double total = 0.0;
  for (const auto& p : points) total += std::hypot(p.flow.u, p.flow.v);
  return total / static_cast<double>(points.size());
}

namespace {

constexpr int kDegenerate = -1;

// Minimal subsets for every iteration, drawn up front so that hypothesis i is
// the same no matter how scoring is scheduled.
std::vector<std::vector<int>> draw_subsets(int sample_count, int subset_size, const RansacConfig& cfg) {
  Rng rng(cfg.seed);
  std::vector<int> pool(static_cast<std::size_t>(sample_count));
  std::vector<std::vector<int>> subsets(static_cast<std::size_t>(cfg.iterations));
  for (auto& subset : subsets) {
    std::iota(pool.begin(), pool.end(), 0);
    // Partial Fisher-Yates: the first subset_size slots become the draw.
    for (int i = 0; i < subset_size; ++i) {
      std::uniform_int_distribution<int> pick(i, sample_count - 1);
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
    }
    subset.assign(pool.begin(), pool.begin() + subset_size);
  }
  return subsets;
}

template <typename Model>
Model fit_kind(std::span<const SamplePoint> points, Domain domain);

template <>
QuadraticFlowModel fit_kind<QuadraticFlowModel>(std::span<const SamplePoint> points, Domain domain) {
  return lsre_fit(points, domain);
}

template <>
LinearFlowModel fit_kind<LinearFlowModel>(std::span<const SamplePoint> points, Domain domain) {
  return lsre_fit_linear(points, domain);
}

template <typename Model>
std::vector<int> inliers_of(const Model& model, std::span<const SamplePoint> samples, double threshold) {
  std::vector<int> idx;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (residual(model, samples[i]) <= threshold) idx.push_back(static_cast<int>(i));
  }
  return idx;
}

template <typename Model>
int score_hypothesis(std::span<const SamplePoint> samples, const std::vector<int>& subset, Domain domain,
                     double threshold) {
  std::vector<SamplePoint> minimal;
  minimal.reserve(subset.size());
  for (int i : subset) minimal.push_back(samples[static_cast<std::size_t>(i)]);
  try {
    const auto model = fit_kind<Model>(minimal, domain);
    int count = 0;
    for (const auto& s : samples) {
      if (residual(model, s) <= threshold) ++count;
    }
    return count;
  } catch (const Error&) {
    return kDegenerate;
  }
}

template <typename Model>
CraSelection finish_selection(std::span<const SamplePoint> samples, const std::vector<std::vector<int>>& subsets,
                              const std::vector<int>& scores, Domain domain, double threshold) {
  CraSelection sel;
  int best = kDegenerate;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] == kDegenerate) {
      ++sel.degenerate_hypotheses;
    } else if (scores[i] > best) {
      best = scores[i];
      sel.winning_iteration = static_cast<int>(i);
    }
  }
  if (sel.winning_iteration < 0) {
    throw Error(ErrorCode::DegenerateModel, "every RANSAC hypothesis was a singular fit");
  }
  std::vector<SamplePoint> minimal;
  for (int i : subsets[static_cast<std::size_t>(sel.winning_iteration)]) {
    minimal.push_back(samples[static_cast<std::size_t>(i)]);
  }
  sel.inliers = inliers_of(fit_kind<Model>(minimal, domain), samples, threshold);
  return sel;
}

void check_inputs(std::span<const SamplePoint> samples, const RansacConfig& cfg, ModelKind kind) {
  cfg.validate();
  const int need = minimal_subset(kind);
  if (static_cast<int>(samples.size()) < need) {
    throw Error(ErrorCode::InsufficientSamples, "CRA needs at least " + std::to_string(need) + " samples, got " +
                                                    std::to_string(samples.size()));
  }
}

template <typename Model>
CraSelection select_parallel(std::span<const SamplePoint> samples, Domain domain, const RansacConfig& cfg,
                             ModelKind kind) {
  const auto subsets = draw_subsets(static_cast<int>(samples.size()), minimal_subset(kind), cfg);
  std::vector<int> scores(subsets.size(), kDegenerate);
  const int n = static_cast<int>(subsets.size());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    scores[static_cast<std::size_t>(i)] =
        score_hypothesis<Model>(samples, subsets[static_cast<std::size_t>(i)], domain, cfg.inlier_threshold_px);
  }
  return finish_selection<Model>(samples, subsets, scores, domain, cfg.inlier_threshold_px);
}

template <typename Model>
CraSelection select_serial(std::span<const SamplePoint> samples, Domain domain, const RansacConfig& cfg,
                           ModelKind kind) {
  const auto subsets = draw_subsets(static_cast<int>(samples.size()), minimal_subset(kind), cfg);
  std::vector<int> scores;
  scores.reserve(subsets.size());
  for (const auto& subset : subsets) {
    scores.push_back(score_hypothesis<Model>(samples, subset, domain, cfg.inlier_threshold_px));
  }
  return finish_selection<Model>(samples, subsets, scores, domain, cfg.inlier_threshold_px);
}

template <typename Model>
BasicCraResult<Model> refit(std::span<const SamplePoint> samples, const CraSelection& selection, Domain domain,
                            const RansacConfig& cfg) {
  std::vector<SamplePoint> chosen;
  chosen.reserve(selection.inliers.size());
  for (int i : selection.inliers) chosen.push_back(samples[static_cast<std::size_t>(i)]);

  BasicCraResult<Model> result;
  result.model = fit_kind<Model>(chosen, domain);
  for (int i : inliers_of(result.model, samples, cfg.inlier_threshold_px)) {
    result.inliers.push_back(samples[static_cast<std::size_t>(i)]);
  }
  result.inlier_ratio = static_cast<double>(result.inliers.size()) / static_cast<double>(samples.size());
  result.winning_iteration = selection.winning_iteration;
  return result;
}

}  // namespace

CraSelection cra_select(std::span<const SamplePoint> samples, Domain domain, const RansacConfig& cfg,
                        ModelKind kind) {
  check_inputs(samples, cfg, kind);
  return kind == ModelKind::Quadratic ? select_parallel<QuadraticFlowModel>(samples, domain, cfg, kind)
                                      : select_parallel<LinearFlowModel>(samples, domain, cfg, kind);
}

CraResult cra_refit(std::span<const SamplePoint> samples, const CraSelection& selection, Domain domain,
                    const RansacConfig& cfg) {
  return refit<QuadraticFlowModel>(samples, selection, domain, cfg);
}

LinearCraResult cra_refit_linear(std::span<const SamplePoint> samples, const CraSelection& selection,
                                 Domain domain, const RansacConfig& cfg) {
  return refit<LinearFlowModel>(samples, selection, domain, cfg);
}

CraResult cra_fit(std::span<const SamplePoint> samples, Domain domain, const RansacConfig& cfg) {
  return cra_refit(samples, cra_select(samples, domain, cfg, ModelKind::Quadratic), domain, cfg);
}

LinearCraResult cra_fit_linear(std::span<const SamplePoint> samples, Domain domain, const RansacConfig& cfg) {
  return cra_refit_linear(samples, cra_select(samples, domain, cfg, ModelKind::Linear), domain, cfg);
}

namespace reference {

CraSelection cra_select_serial(std::span<const SamplePoint> samples, Domain domain, const RansacConfig& cfg,
                               ModelKind kind) {
  check_inputs(samples, cfg, kind);
  return kind == ModelKind::Quadratic ? select_serial<QuadraticFlowModel>(samples, domain, cfg, kind)
                                      : select_serial<LinearFlowModel>(samples, domain, cfg, kind);
}

}  // namespace reference

}  // namespace flowmotion
