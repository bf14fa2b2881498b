#pragma once

#include "flowmotion/flow_model.hpp"

namespace flowmotion {

struct SamplePoint {
  PixelCoord coord;
  FlowVec flow;
};

}  // namespace flowmotion
