#pragma once

#include <Eigen/Core>

#include "ionclock/physics.hpp"

namespace ionclock {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Largest epsilon = 2 omega_z / Omega accepted; the shift expansions are
/// only meaningful deep in the perturbative regime.
inline constexpr double max_epsilon = 0.2;

/*!
Linear Paul trap. omega_z is the pseudo-potential axial frequency, Omega the
RF drive, `a` the RF strength relative to the DC curvature and `delta` the
transverse DC asymmetry. a = sqrt(3), delta = 0 gives a spherical trap.
*/
struct TrapConfig {
    double omega_z = 0.0;  // rad/s
    double Omega = 0.0;    // rad/s
    double a = std::numbers::sqrt3;
    double delta = 0.0;

    double epsilon() const { return 2.0 * omega_z / Omega; }
    bool spherical(double tol = 1e-12) const;

    /// Throws DomainError outside omega_z > 0, Omega > 0, epsilon < max_epsilon.
    void validate() const;
};

struct ScaledUnits {
    double length_scale = 0.0;  // l, m
    double time_scale = 0.0;    // 2 / Omega, s
    double epsilon = 0.0;
};

struct LambdaMatrices {
    Mat3 lambda_rf;    // diag(a, -a, 0)
    Mat3 lambda_s;     // diag(-1/2 + delta, -1/2 - delta, 1)
    Mat3 lambda_unit;  // lambda_rf / a

    /// Pseudo-potential curvature Lambda_s + Lambda_rf^2 / 2 in units of omega_z^2.
    Mat3 curvature() const { return lambda_s + 0.5 * lambda_rf * lambda_rf; }
};

double characteristic_length(const ClockSpecies& species, double omega_z);
ScaledUnits scaled_units(const ClockSpecies& species, const TrapConfig& trap);

LambdaMatrices lambda_matrices(double a, double delta);
inline LambdaMatrices lambda_matrices(const TrapConfig& trap)
{
    return lambda_matrices(trap.a, trap.delta);
}

/// Omega_0 = (q / m c) sqrt(h nu / -Delta alpha).
double magic_rf_frequency(const ClockSpecies& species);

/// Omega / Omega_0 for the configured drive.
double magic_ratio(const ClockSpecies& species, const TrapConfig& trap);

/// (a omega_z l / 2c)^2, the common prefactor of all micromotion shifts.
double micromotion_prefactor(const ClockSpecies& species, const TrapConfig& trap);

struct MagicCorrections {
    double lambda0 = 1.0;        // general linear trap
    double lambda1 = 1.0;
    double lambda0_sph = 1.0;    // spherical trap, continuum space charge
    double lambda1_sph = 1.0;
};

/// O(epsilon^2) correction factors to the magic drive frequency.
MagicCorrections corrected_magic_factors(double epsilon, double a);

/// Omega_0 sqrt(lambda0'), the drive at which the spherical-trap shift vanishes,
/// with epsilon evaluated self-consistently at that drive. With
/// spherical_continuum = false the general-trap lambda0 is used instead.
double corrected_magic_rf_frequency(const ClockSpecies& species, double omega_z, double a,
                                    bool spherical_continuum = true);

// Penning trap analogues.

/// Fractional shift of an ion at cylindrical radius rho (m) in a crystal
/// rotating at omega_r (rad/s).
double penning_fractional_shift(const ClockSpecies& species, double omega_r, double rho);

/// Rotation frequency at which the Penning-trap shift vanishes.
double penning_magic_rotation(const ClockSpecies& species);

/// Minimum magnetic field for which the magic rotation lies below the
/// cyclotron frequency, B_min = sqrt(h nu / -Delta alpha) / c.
double penning_min_field(double nu, double delta_alpha);

}  // namespace ionclock
