#pragma once

#include <optional>
#include <ostream>
#include <span>

#include "flowmotion/detector.hpp"
#include "flowmotion/eval.hpp"
#include "flowmotion/sequence.hpp"

namespace flowmotion {

// Line-delimited key=value report. The header echoes the configuration under
// "config." keys; each frame is a block opened by "frame=<index>" and closed
// by a blank line. Keys starting with "time_" carry wall-clock timings and are
// the only non-deterministic content.
void write_report_header(std::ostream& out, const DetectorConfig& cfg, std::uint64_t seed);
void write_frame_record(std::ostream& out, const FrameRecord& record);
void write_score(std::ostream& out, const SequenceScore& score);

}  // namespace flowmotion
