#pragma once

#include "btms/config.hpp"
#include "btms/labeling.hpp"

namespace btms {

LabelOptions label_options(const TgfConfig& config);

// Full segmentation: build the field, fit and classify nodes, graph search
// from seeds, optional kernel completion, corner fitting and refit, point
// labeling. Errors carry the failing stage in their message.
SegmentationResult segment(const PointCloud& cloud, const TgfConfig& config);

}  // namespace btms
