#include "wuigraph/node.hpp"

#include <algorithm>

namespace wuigraph {

std::array<double, kFeatureDim> Node::features() const {
  std::array<double, kFeatureDim> f{};
  std::copy(embedding.begin(), embedding.end(), f.begin());
  f[kSlopeSlot] = slope;
  f[kElevationSlot] = elevation;
  if (is_building()) {
    std::copy(structural.begin(), structural.end(), f.begin() + kStructuralOffset);
  }
  return f;
}

}  // namespace wuigraph
