#include "flowmotion/eval.hpp"

#include <numeric>

#include "flowmotion/error.hpp"

namespace flowmotion {

double iou(const ForegroundMask& pred, const ForegroundMask& gt) {
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw Error(ErrorCode::DimensionMismatch, "masks differ in size");
  }
  const auto a = pred.bits();
  const auto b = gt.bits();
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += static_cast<std::size_t>(a[i] & b[i]);
    uni += static_cast<std::size_t>(a[i] | b[i]);
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

SequenceScore score_ious(std::vector<double> per_frame_iou) {
  if (per_frame_iou.empty()) throw Error(ErrorCode::EmptySequence, "no frames to score");
  SequenceScore s;
  s.per_frame_iou = std::move(per_frame_iou);
  const auto& v = s.per_frame_iou;
  const std::size_t n = v.size();
  s.j_mean = mean_of(v);
  std::size_t hits = 0;
  for (double x : v) hits += x > 0.5 ? 1 : 0;
  s.j_recall = static_cast<double>(hits) / static_cast<double>(n);
  // Four temporal bins, earlier bins one longer when n % 4 != 0. With fewer
  // than four frames the last bin would be empty and decay is reported as 0.
  if (n >= 4) {
    const std::size_t base = n / 4;
    const std::size_t extra = n % 4;
    const std::size_t first_len = base + (extra > 0 ? 1 : 0);
    const std::size_t last_len = base;
    const std::span<const double> all(v);
    s.j_decay = mean_of(all.first(first_len)) - mean_of(all.last(last_len));
  }
  return s;
}

SequenceScore score_sequence(std::span<const ForegroundMask> preds, std::span<const ForegroundMask> gts) {
  if (preds.size() != gts.size()) {
    throw Error(ErrorCode::DimensionMismatch, "prediction and ground-truth sequences differ in length");
  }
  if (preds.empty()) throw Error(ErrorCode::EmptySequence, "no frames to score");
  std::vector<double> ious(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) ious[i] = iou(preds[i], gts[i]);
  return score_ious(std::move(ious));
}

}  // namespace flowmotion
