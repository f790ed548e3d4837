#pragma once

#include <span>
#include <vector>

#include "ionclock/trap.hpp"

namespace ionclock::detail {

/// Pair separations below this (scaled, squared) are treated as coincident.
inline constexpr double coincidence_r2 = 1e-20;

// Structure-of-arrays copy of the positions for the O(N^2) Coulomb sum.
struct ForceKernel {
    std::vector<double> x, y, z;

    void load(std::span<const Vec3> positions);

    /// Fills forces with sum_j r_ij / r_ij^3; returns sum_{i<j} 1 / r_ij.
    double coulomb(std::vector<Vec3>& forces) const;
};

}  // namespace ionclock::detail
