#pragma once

#include <map>
#include <utility>

#include "ionclock/crystal.hpp"
#include "ionclock/physics.hpp"
#include "ionclock/trap.hpp"

namespace ionclock::testing {

/// omega_z = 2 pi x 200 kHz, spherical geometry, drive at rel * Omega0.
inline TrapConfig standard_trap(double rel = 1.0)
{
    TrapConfig t;
    t.omega_z = two_pi * 200e3;
    t.Omega = rel * magic_rf_frequency(lu176_species());
    return t;
}

/// Solved once per process and reused.
inline const IonCrystal& cached_crystal(std::size_t n, SeedFamily family = SeedFamily::icosahedral)
{
    static std::map<std::pair<std::size_t, SeedFamily>, IonCrystal> cache;
    auto it = cache.find({n, family});
    if (it == cache.end()) {
        it = cache.emplace(std::make_pair(n, family),
                           solve_crystal(n, family, 1, standard_trap(), SolverParams{}))
                 .first;
    }
    return it->second;
}

}  // namespace ionclock::testing
