#pragma once

#include <span>
#include <vector>

#include "flowmotion/detector.hpp"

namespace flowmotion {

struct SequenceScore {
  std::vector<double> per_frame_iou;
  double j_mean = 0.0;
  double j_recall = 0.0;
  double j_decay = 0.0;
};

// Jaccard index; 1.0 when both masks are empty. Throws DimensionMismatch.
double iou(const ForegroundMask& pred, const ForegroundMask& gt);

// Region statistics over a sequence: mean IoU, fraction of frames with
// IoU > 0.5, and first-quartile minus last-quartile mean IoU.
SequenceScore score_sequence(std::span<const ForegroundMask> preds, std::span<const ForegroundMask> gts);
SequenceScore score_ious(std::vector<double> per_frame_iou);

}  // namespace flowmotion
