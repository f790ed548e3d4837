#pragma once

#include <vector>

#include <Eigen/Core>

#include "ionclock/crystal.hpp"
#include "ionclock/distribution.hpp"
#include "ionclock/physics.hpp"

namespace ionclock {

using CVec3 = Eigen::Vector3cd;

inline constexpr std::size_t oracle_max_ions = 16;

struct OracleParams {
    int steps_per_cycle = 400;
    int transient_cycles = 100;  // damped, with the damping ramped to zero
    int record_cycles = 64;
    double damping = -1.0;       // scaled rate; negative selects epsilon (secular scale)
    int max_newton_iterations = 12;
    double newton_tolerance = 1e-13;  // on the one-period return map, scaled units
    Vec3 static_field = Vec3::Zero();  // extra uniform DC field, units of m omega_z^2 l / q

    void validate() const;
};

/*!
Sampled steady-state trajectory of the RF-driven equations of motion and its
Fourier components r_i(t) = sum_n R_{2n,i} exp(2int) (scaled time, period pi).
Positions/velocities are stored per sample as [sample][ion].
*/
struct TrajectoryRecord {
    int steps_per_cycle = 0;
    int n_cycles = 0;
    double time_step = 0.0;  // scaled
    Vec3 static_field = Vec3::Zero();
    std::vector<std::vector<Vec3>> positions;
    std::vector<std::vector<Vec3>> velocities;

    std::vector<CVec3> r0, r2, r4, r6;
    double periodicity_residual = 0.0;  // |P(x) - x| after shooting
    double harmonic_residual = 0.0;     // power outside n = 0..3 over total

    std::size_t n_ions() const { return r0.size(); }
    std::vector<Vec3> real_part(const std::vector<CVec3>& v) const;
};

/*!
Integrates r'' + (eps^2 Lambda_s + 2 eps Lambda_rf cos 2t) r - eps^2 sum r_ij/r_ij^3 = 0
with classical RK4. Starts from the crystal plus first-order micromotion, runs
a damped transient, then Newton-shoots onto the exact pi-periodic orbit and
records params.record_cycles undamped periods.
*/
TrajectoryRecord integrate_full_eom(const IonCrystal& initial, const TrapConfig& trap,
                                    const OracleParams& params = {});

/*!
In the spherical trap every rotation of an equilibrium is an equilibrium, but
the RF drive only has periodic orbits at orientations it leaves invariant.
Rotates the crystal so its principal axes lie along x, y, z (largest extent on
x) and ion 0 sits at zero azimuth, which is such an orientation for N <= 3.
Throws PreconditionError unless crystal.trap is spherical.
*/
IonCrystal symmetric_orientation(const IonCrystal& crystal);

/// Crystal whose positions are the oracle's time-averaged R0.
IonCrystal oracle_mean_crystal(const TrajectoryRecord& record, const IonCrystal& like);

/*!
Formula-independent clock shift per ion: -<v^2>/2c^2 from the sampled
velocities plus -(Delta alpha / 2 h nu) <E^2> from the sampled total field
(trap RF + trap DC + space charge).
*/
ShiftDistribution oracle_time_dilation(const TrajectoryRecord& record, const ClockSpecies& species,
                                       const TrapConfig& trap);

}  // namespace ionclock
