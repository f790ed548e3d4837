#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ionclock/crystal.hpp"
#include "ionclock/distribution.hpp"
#include "ionclock/physics.hpp"

namespace ionclock {

/// Field-gradient tensor at one ion from all the others, scaled units
/// (multiply by m omega_z^2 / q for V/m^2). Symmetric and traceless.
struct QuadrupoleTensor {
    Mat3 q_matrix = Mat3::Zero();
    std::size_t ion_index = 0;
};

/// Orientation of the quantisation axis; the third Euler angle drops out.
struct FieldOrientation {
    double alpha = 0.0;  // rad
    double beta = 0.0;   // rad, [0, pi]
};

/// `count` orientations on a golden-angle spiral over the upper hemisphere.
std::vector<FieldOrientation> orientation_sweep(int count);

QuadrupoleTensor quadrupole_tensor(const IonCrystal& crystal, std::size_t i);
std::vector<QuadrupoleTensor> quadrupole_tensors(const IonCrystal& crystal);

/*!
Geometric factor of the quadrupole shift:
  Qzz/4 (3 cos^2 b - 1) + 1/2 sin 2b (Qxz cos a + Qyz sin a)
  + 1/4 sin^2 b ((Qxx - Qyy) cos 2a + 2 Qxy sin 2a)
*/
double quadrupole_geometric_factor(const QuadrupoleTensor& q, const FieldOrientation& orient);

/// Theta m omega_z^2 / (q h) in Hz: the shift produced by a unit scaled
/// geometric factor. Negative for a negative quadrupole moment.
double quadrupole_scale_hz(const ClockSpecies& species, const TrapConfig& trap);

/// Per-ion quadrupole shift in Hz with the state factor C_{F,mF} set to 1.
ShiftDistribution quadrupole_shift_distribution(const IonCrystal& crystal,
                                                const ClockSpecies& species,
                                                const TrapConfig& trap,
                                                const FieldOrientation& orient);

/// Same, reusing precomputed tensors (orientation sweeps).
ShiftDistribution quadrupole_shift_distribution(std::span<const QuadrupoleTensor> tensors,
                                                const ClockSpecies& species,
                                                const TrapConfig& trap,
                                                const FieldOrientation& orient);

/// Unweighted mean of C_F * raw shift over the listed hyperfine levels.
double hyperfine_average(std::span<const std::pair<double, double>> levels);

/// Convenience: the same raw shift applied to every factor in the species record.
double hyperfine_average(std::span<const double> factors, double raw_shift);

struct RfFieldAverages {
    std::vector<double> anisotropic;  // <3 E_z^2 - E^2>, V^2/m^2
    std::vector<double> total;        // <E^2>, V^2/m^2
};

/*!
Cycle-averaged RF field moments at each ion. The field amplitude is
-(m omega_z Omega l / q)(Lambda_rf R0 - eps^2/4 W0); a cycle average of a
cosine-modulated field contributes amplitude^2 / 2.
*/
RfFieldAverages rf_quadratic_field_average(const IonCrystal& crystal, const ClockSpecies& species,
                                           const TrapConfig& trap,
                                           const Vec3& quantisation_axis = Vec3::UnitZ());

/// Tensor-polarisability shift from the RF field, fractional, C factor set to 1,
/// quantisation axis along the trap axis.
ShiftDistribution tensor_shift_distribution(const IonCrystal& crystal, const ClockSpecies& species,
                                            const TrapConfig& trap);

/// Laguerre-Gauss LG01 ("doughnut") compensation beam propagating along z.
struct BeamProfile {
    double waist = 0.0;        // m
    double power = 0.0;        // W
    double wavelength = 0.0;   // m
    double alpha2 = 0.0;       // tensor polarisability at the wavelength, SI

    void validate() const;
};

/// Beam template at the species' compensation wavelength, zero power.
BeamProfile compensation_beam(const ClockSpecies& species, double waist);

/// I(rho) = 4P / (pi w^4) rho^2 exp(-2 rho^2 / w^2), W/m^2.
double lg_doughnut_intensity(double rho, const BeamProfile& beam);

/*!
RF tensor shift plus the beam's tensor shift. The beam is linearly polarised
transverse to z, so <3E_z^2 - E^2> = -<E^2> with the cycle-averaged
<E^2> = I / (eps0 c). Throws SignError unless the beam polarisability has
the opposite sign to the DC tensor polarisability.
*/
ShiftDistribution compensated_tensor_distribution(const IonCrystal& crystal,
                                                  const ClockSpecies& species,
                                                  const TrapConfig& trap,
                                                  const BeamProfile& beam);

/// Power in [0, max_power] minimising the std of the compensated distribution.
/// The total shift is affine in P, so the minimiser is the clipped root of
/// d var / dP.
BeamProfile optimize_compensation_power(const IonCrystal& crystal, const ClockSpecies& species,
                                        const TrapConfig& trap, const BeamProfile& beam_template,
                                        double max_power = 1e3);

}  // namespace ionclock
