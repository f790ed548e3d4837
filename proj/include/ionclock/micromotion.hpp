#pragma once

#include <span>
#include <vector>

#include "ionclock/crystal.hpp"
#include "ionclock/distribution.hpp"
#include "ionclock/physics.hpp"

namespace ionclock {

/// Coulomb force and field-gradient kernels for the pair (i, j), scaled units:
/// F = R_ij / |R_ij|^3, Q = -(3 R_ij R_ij^T - |R_ij|^2 I) / |R_ij|^5.
struct PairKernels {
    Vec3 force;
    Mat3 gradient;
};

PairKernels coulomb_pair_kernels(const IonCrystal& crystal, std::size_t i, std::size_t j);

/// W0_i = sum_j Q_ij Lambda_rf (R0_i - R0_j): the RF field induced on ion i by
/// the differential micromotion of its neighbours (scaled).
std::vector<Vec3> space_charge_w(const IonCrystal& crystal);

/// Continuum estimate W0_i ~ -(1/5) Lambda_rf R0_i for a uniform spherical crystal.
std::vector<Vec3> continuum_space_charge_w(const IonCrystal& crystal);

enum class AmplitudeOrder { first, second };

/// Fourier components of the pi-periodic solution r = sum R_2n exp(2int).
struct FourierAmplitudes {
    std::vector<Vec3> r2;
    std::vector<Vec3> r4;
    AmplitudeOrder order = AmplitudeOrder::first;
};

/*!
First order: R2 = (eps/4) Lambda_rf R0, R4 = (eps/16) Lambda_rf R2.
Second order: R2 = (I + eps^2/4 (Lambda_s + Lambda_rf^2/16)) (eps/4) Lambda_rf R0
                   - eps^3/16 W0, and R4 from the corrected R2.
eps is taken from `trap`; the geometry (a, delta) from the crystal.
*/
FourierAmplitudes micromotion_amplitudes(const IonCrystal& crystal, const TrapConfig& trap,
                                         AmplitudeOrder order);

/// Lowest-order micromotion shift, -(omega_z l/2c)^2 [1 - (Omega/Omega0)^2] R0^T Lambda_rf^2 R0.
ShiftDistribution lowest_order_shift(const IonCrystal& crystal, const ClockSpecies& species,
                                     const TrapConfig& trap);

/// The three terms inside the braces of the linear-trap shift, per ion, before
/// multiplication by -(a omega_z l / 2c)^2.
struct LinearTrapShiftTerms {
    std::vector<double> magic_term;  // [lambda0 - (Omega/Omega0)^2] lambda1 R^T Lambda^2 R
    std::vector<double> delta_term;  // (delta eps^2 / 2) R^T Lambda R
    std::vector<double> w_term;      // -(eps^2 / 2a) [1 - (Omega/Omega0)^2] R^T Lambda W0
    double prefactor = 0.0;          // (a omega_z l / 2c)^2
};

/// Total micromotion + space-charge shift to O(eps^2) for a linear Paul trap,
/// using the exact pairwise W0.
ShiftDistribution full_shift_linear_trap(const IonCrystal& crystal, const ClockSpecies& species,
                                         const TrapConfig& trap,
                                         LinearTrapShiftTerms* terms = nullptr);

/// Same, with a caller-supplied W0 (e.g. the continuum estimate).
ShiftDistribution full_shift_linear_trap(const IonCrystal& crystal, const ClockSpecies& species,
                                         const TrapConfig& trap, std::span<const Vec3> w0,
                                         LinearTrapShiftTerms* terms = nullptr);

/// Spherical trap (a = sqrt 3, delta = 0) with the continuum W0:
/// -(a omega_z l/2c)^2 [lambda0' - (Omega/Omega0)^2] lambda1' R^T Lambda^2 R.
/// Throws PreconditionError for any other geometry.
ShiftDistribution spherical_shift(const IonCrystal& crystal, const ClockSpecies& species,
                                  const TrapConfig& trap);

struct ModulationIndex {
    std::vector<double> beta;
    std::vector<double> rabi_reduction;  // J0(beta)
};

/// beta_i = 2 l k . R2_i for a probe with wavevector k (rad/m, SI), first-order R2.
ModulationIndex modulation_index(const IonCrystal& crystal, const Vec3& probe_wavevector,
                                 const ClockSpecies& species, const TrapConfig& trap);

/// J0 via the standard library's cylindrical Bessel function.
double bessel_j0(double x);

/// Throws ValidationError unless crystal.trap has the same (a, delta) as trap.
void check_geometry(const IonCrystal& crystal, const TrapConfig& trap);

}  // namespace ionclock
