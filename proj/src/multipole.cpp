#include "ionclock/multipole.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ionclock/errors.hpp"
#include "ionclock/micromotion.hpp"

namespace ionclock {

namespace {

Mat3 pair_gradient(const Vec3& rij)
{
    const double r2 = rij.squaredNorm();
    if (r2 < 1e-20) throw SingularityError("quadrupole tensor: coincident ions");
    const double r = std::sqrt(r2);
    return -(3.0 * rij * rij.transpose() - r2 * Mat3::Identity()) / (r2 * r2 * r);
}

// Affine decomposition total_i = base_i + P * per_watt_i of the compensated shift.
struct CompensationTerms {
    std::vector<double> base;
    std::vector<double> per_watt;
};

CompensationTerms compensation_terms(const IonCrystal& crystal, const ClockSpecies& species,
                                     const TrapConfig& trap, const BeamProfile& beam)
{
    beam.validate();
    if (species.alpha2_dc * beam.alpha2 >= 0.0 && beam.alpha2 != 0.0) {
        throw SignError("compensation beam polarisability must have the opposite sign to the "
                        "DC tensor polarisability");
    }
    CompensationTerms t;
    t.base = tensor_shift_distribution(crystal, species, trap).per_ion;

    const double l = characteristic_length(species, trap.omega_z);
    const double h_nu = constants::h * species.clock_frequency;
    BeamProfile unit = beam;
    unit.power = 1.0;
    t.per_watt.reserve(crystal.size());
    for (const auto& r : crystal.positions) {
        const double rho = l * std::hypot(r[0], r[1]);
        const double e2 = lg_doughnut_intensity(rho, unit) / (constants::epsilon0 * constants::c);
        // -(1/4)(alpha2 / h nu) <3Ez^2 - E^2>, with <3Ez^2 - E^2> = -<E^2>.
        t.per_watt.push_back(0.25 * beam.alpha2 / h_nu * e2);
    }
    return t;
}

}  // namespace

std::vector<FieldOrientation> orientation_sweep(int count)
{
    if (count < 1) throw DomainError("orientation_sweep: count must be positive");
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    std::vector<FieldOrientation> out;
    for (int k = 0; k < count; ++k) {
        const double cb = 1.0 - (k + 0.5) / count;
        out.push_back({std::fmod(k * golden, two_pi), std::acos(cb)});
    }
    return out;
}

QuadrupoleTensor quadrupole_tensor(const IonCrystal& crystal, std::size_t i)
{
    QuadrupoleTensor q;
    q.ion_index = i;
    const auto& R = crystal.positions;
    for (std::size_t j = 0; j < R.size(); ++j) {
        if (j != i) q.q_matrix += pair_gradient(R.at(i) - R[j]);
    }
    return q;
}

std::vector<QuadrupoleTensor> quadrupole_tensors(const IonCrystal& crystal)
{
    const auto& R = crystal.positions;
    const std::size_t n = R.size();
    std::vector<QuadrupoleTensor> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i].ion_index = i;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            // Even in R_ij, so both ions receive the same pair term.
            const Mat3 g = pair_gradient(R[i] - R[j]);
            out[i].q_matrix += g;
            out[j].q_matrix += g;
        }
    }
    return out;
}

double quadrupole_geometric_factor(const QuadrupoleTensor& q, const FieldOrientation& orient)
{
    const Mat3& Q = q.q_matrix;
    const double a = orient.alpha, b = orient.beta;
    const double cb = std::cos(b), sb = std::sin(b);
    return Q(2, 2) / 4.0 * (3.0 * cb * cb - 1.0) +
           0.5 * std::sin(2.0 * b) * (Q(0, 2) * std::cos(a) + Q(1, 2) * std::sin(a)) +
           0.25 * sb * sb * ((Q(0, 0) - Q(1, 1)) * std::cos(2.0 * a) + 2.0 * Q(0, 1) * std::sin(2.0 * a));
}

double quadrupole_scale_hz(const ClockSpecies& species, const TrapConfig& trap)
{
    const double gradient_unit = species.mass * trap.omega_z * trap.omega_z / species.charge;
    return species.quadrupole_moment * gradient_unit / constants::h;
}

ShiftDistribution quadrupole_shift_distribution(const IonCrystal& crystal,
                                                const ClockSpecies& species,
                                                const TrapConfig& trap,
                                                const FieldOrientation& orient)
{
    const auto tensors = quadrupole_tensors(crystal);
    return quadrupole_shift_distribution(tensors, species, trap, orient);
}

ShiftDistribution quadrupole_shift_distribution(std::span<const QuadrupoleTensor> tensors,
                                                const ClockSpecies& species,
                                                const TrapConfig& trap,
                                                const FieldOrientation& orient)
{
    const double scale = quadrupole_scale_hz(species, trap);
    std::vector<double> shift;
    shift.reserve(tensors.size());
    for (const auto& q : tensors) shift.push_back(scale * quadrupole_geometric_factor(q, orient));
    return ShiftDistribution::from_samples(std::move(shift), "quadrupole", "Hz");
}

double hyperfine_average(std::span<const std::pair<double, double>> levels)
{
    if (levels.empty()) throw DomainError("hyperfine_average: no levels");
    double sum = 0.0;
    for (const auto& [c, shift] : levels) sum += c * shift;
    return sum / double(levels.size());
}

double hyperfine_average(std::span<const double> factors, double raw_shift)
{
    if (factors.empty()) throw DomainError("hyperfine_average: no levels");
    double sum = 0.0;
    for (double c : factors) sum += c;
    return sum * raw_shift / double(factors.size());
}

RfFieldAverages rf_quadratic_field_average(const IonCrystal& crystal, const ClockSpecies& species,
                                           const TrapConfig& trap, const Vec3& quantisation_axis)
{
    check_geometry(crystal, trap);
    const double axis_norm = quantisation_axis.norm();
    if (!(axis_norm > 0.0)) throw DomainError("rf_quadratic_field_average: zero quantisation axis");
    const Vec3 axis = quantisation_axis / axis_norm;

    const Mat3 lrf = lambda_matrices(trap).lambda_rf;
    const double eps = trap.epsilon();
    const double l = characteristic_length(species, trap.omega_z);
    const double field_unit = species.mass * trap.omega_z * trap.Omega * l / species.charge;
    const auto w = space_charge_w(crystal);

    RfFieldAverages out;
    out.anisotropic.reserve(crystal.size());
    out.total.reserve(crystal.size());
    for (std::size_t i = 0; i < crystal.size(); ++i) {
        const Vec3 amplitude = -field_unit * (lrf * crystal.positions[i] - 0.25 * eps * eps * w[i]);
        const double e2 = 0.5 * amplitude.squaredNorm();
        const double ez = axis.dot(amplitude);
        out.total.push_back(e2);
        out.anisotropic.push_back(3.0 * 0.5 * ez * ez - e2);
    }
    return out;
}

ShiftDistribution tensor_shift_distribution(const IonCrystal& crystal, const ClockSpecies& species,
                                            const TrapConfig& trap)
{
    const auto fields = rf_quadratic_field_average(crystal, species, trap, Vec3::UnitZ());
    const double coeff = -0.25 * species.alpha2_dc / (constants::h * species.clock_frequency);
    std::vector<double> shift;
    shift.reserve(crystal.size());
    for (double x : fields.anisotropic) shift.push_back(coeff * x);
    return ShiftDistribution::from_samples(std::move(shift), "tensor (RF, uncompensated)");
}

void BeamProfile::validate() const
{
    if (!(waist > 0.0)) throw DomainError("beam: waist must be positive");
    if (!(power >= 0.0)) throw DomainError("beam: power must be non-negative");
}

BeamProfile compensation_beam(const ClockSpecies& species, double waist)
{
    BeamProfile b;
    b.waist = waist;
    b.power = 0.0;
    b.wavelength = species.magic_compensation_wavelength;
    b.alpha2 = species.alpha2_magic;
    return b;
}

double lg_doughnut_intensity(double rho, const BeamProfile& beam)
{
    if (rho < 0.0) throw DomainError("lg_doughnut_intensity: rho must be non-negative");
    beam.validate();
    const double w2 = beam.waist * beam.waist;
    return 4.0 * beam.power / (std::numbers::pi * w2 * w2) * rho * rho * std::exp(-2.0 * rho * rho / w2);
}

ShiftDistribution compensated_tensor_distribution(const IonCrystal& crystal,
                                                  const ClockSpecies& species,
                                                  const TrapConfig& trap,
                                                  const BeamProfile& beam)
{
    const auto t = compensation_terms(crystal, species, trap, beam);
    std::vector<double> shift(t.base.size());
    for (std::size_t i = 0; i < shift.size(); ++i) shift[i] = t.base[i] + beam.power * t.per_watt[i];
    return ShiftDistribution::from_samples(std::move(shift), "tensor (compensated)");
}

BeamProfile optimize_compensation_power(const IonCrystal& crystal, const ClockSpecies& species,
                                        const TrapConfig& trap, const BeamProfile& beam_template,
                                        double max_power)
{
    if (crystal.size() < 2) throw DomainError("optimize_compensation_power: need at least two ions");
    const auto t = compensation_terms(crystal, species, trap, beam_template);
    const double n = double(t.base.size());
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < t.base.size(); ++i) {
        mean_a += t.base[i];
        mean_b += t.per_watt[i];
    }
    mean_a /= n;
    mean_b /= n;
    double cov = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < t.base.size(); ++i) {
        const double db = t.per_watt[i] - mean_b;
        cov += (t.base[i] - mean_a) * db;
        var_b += db * db;
    }
    BeamProfile out = beam_template;
    out.power = var_b > 0.0 ? std::clamp(-cov / var_b, 0.0, max_power) : 0.0;
    return out;
}

}  // namespace ionclock
