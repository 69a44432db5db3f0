#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qoptics/fock.hpp"

namespace qoptics::detail {

/// Flat-index layout of a subset of modes inside a larger space.
/// `local[j]` is the offset of local index j (little-endian over the subset
/// in the order given), `rest[k]` enumerates every configuration of the
/// remaining modes in their original order.
struct SubsetLayout {
    std::vector<std::size_t> local;
    std::vector<std::size_t> rest;
};

SubsetLayout layout_of(const ModeSpace &space,
                       const std::vector<std::string> &subset);

/// v <- (m on the subset) v, in place.
void apply_in_place(const Matrix &m, const SubsetLayout &lay,
                    Eigen::Ref<Vector> v);

} // namespace qoptics::detail
