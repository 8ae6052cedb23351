#pragma once

#include "topoboost/ph_core.hpp"

namespace oracle {

/// Exact bottleneck distance (L-infinity ground metric, diagonal allowed) by
/// enumerating candidate costs and testing for a perfect matching. Infinite
/// pairs only match infinite pairs, by birth. Returns +inf when the numbers of
/// infinite pairs differ.
double bottleneck_distance(const topoboost::ph::PersistenceDiagram& a,
                           const topoboost::ph::PersistenceDiagram& b);

}  // namespace oracle
