#include "ionclock/trap.hpp"

#include <cmath>
#include <string>

#include "ionclock/errors.hpp"

namespace ionclock {

bool TrapConfig::spherical(double tol) const
{
    return std::abs(a - std::numbers::sqrt3) <= tol && std::abs(delta) <= tol;
}

void TrapConfig::validate() const
{
    if (!(omega_z > 0.0)) throw DomainError("trap: omega_z must be positive");
    if (!(Omega > 0.0)) throw DomainError("trap: RF drive frequency must be positive");
    if (!(epsilon() < max_epsilon)) {
        throw DomainError("trap: epsilon = " + std::to_string(epsilon()) +
                          " outside the perturbative regime (< 0.2)");
    }
}

double characteristic_length(const ClockSpecies& species, double omega_z)
{
    if (!(omega_z > 0.0)) throw DomainError("characteristic_length: omega_z must be positive");
    const double q2 = species.charge * species.charge;
    return std::cbrt(q2 / (4.0 * std::numbers::pi * constants::epsilon0 * species.mass *
                           omega_z * omega_z));
}

ScaledUnits scaled_units(const ClockSpecies& species, const TrapConfig& trap)
{
    trap.validate();
    return {characteristic_length(species, trap.omega_z), 2.0 / trap.Omega, trap.epsilon()};
}

LambdaMatrices lambda_matrices(double a, double delta)
{
    LambdaMatrices m;
    m.lambda_unit = Vec3(1.0, -1.0, 0.0).asDiagonal();
    m.lambda_rf = a * m.lambda_unit;
    m.lambda_s = Vec3(-0.5 + delta, -0.5 - delta, 1.0).asDiagonal();
    return m;
}

double magic_rf_frequency(const ClockSpecies& species)
{
    if (!(species.delta_alpha_static < 0.0)) {
        throw NoMagicFrequencyError("no magic RF frequency for species '" + species.name +
                                    "': differential polarisability must be negative");
    }
    const double h_nu = constants::h * species.clock_frequency;
    return species.charge / (species.mass * constants::c) *
           std::sqrt(h_nu / -species.delta_alpha_static);
}

double magic_ratio(const ClockSpecies& species, const TrapConfig& trap)
{
    return trap.Omega / magic_rf_frequency(species);
}

double micromotion_prefactor(const ClockSpecies& species, const TrapConfig& trap)
{
    const double l = characteristic_length(species, trap.omega_z);
    const double x = trap.a * trap.omega_z * l / (2.0 * constants::c);
    return x * x;
}

MagicCorrections corrected_magic_factors(double epsilon, double a)
{
    if (!(std::abs(epsilon) < max_epsilon)) {
        throw DomainError("corrected_magic_factors: epsilon outside the perturbative regime");
    }
    const double e2 = epsilon * epsilon;
    MagicCorrections f;
    f.lambda1 = 1.0 + a * a * e2 / 8.0;
    f.lambda0 = 1.0 - (16.0 + 5.0 * a * a) / 32.0 * e2 / (2.0 * f.lambda1);
    f.lambda1_sph = 1.0 + 19.0 / 40.0 * e2;
    f.lambda0_sph = 1.0 - 31.0 / 64.0 * e2 / f.lambda1_sph;
    return f;
}

double corrected_magic_rf_frequency(const ClockSpecies& species, double omega_z, double a,
                                    bool spherical_continuum)
{
    // Omega = Omega0 sqrt(lambda0'(eps(Omega))); a few fixed-point sweeps
    // converge to machine precision since d lambda0'/d Omega ~ eps^2.
    const double omega0 = magic_rf_frequency(species);
    double omega = omega0;
    for (int it = 0; it < 50; ++it) {
        const double eps = 2.0 * omega_z / omega;
        const auto f = corrected_magic_factors(eps, a);
        const double next = omega0 * std::sqrt(spherical_continuum ? f.lambda0_sph : f.lambda0);
        if (next == omega) break;
        omega = next;
    }
    return omega;
}

double penning_fractional_shift(const ClockSpecies& species, double omega_r, double rho)
{
    if (rho < 0.0) throw DomainError("penning_fractional_shift: rho must be non-negative");
    const double c = constants::c;
    double bracket = 0.0;
    if (species.delta_alpha_static < 0.0) {
        // (Delta alpha / h nu)(m omega_r c / e)^2 == -(omega_r / omega_magic)^2; this form
        // makes the magic rotation an exact zero.
        const double ratio = omega_r / penning_magic_rotation(species);
        bracket = 1.0 - ratio * ratio;
    } else {
        const double x = species.mass * omega_r * c / species.charge;
        bracket = 1.0 + species.delta_alpha_static / (constants::h * species.clock_frequency) * x * x;
    }
    const double k = omega_r / c;
    return -0.5 * k * k * bracket * rho * rho;
}

double penning_magic_rotation(const ClockSpecies& species)
{
    return magic_rf_frequency(species);
}

double penning_min_field(double nu, double delta_alpha)
{
    if (!(delta_alpha < 0.0)) {
        throw DomainError("penning_min_field: differential polarisability must be negative");
    }
    return std::sqrt(constants::h * nu / -delta_alpha) / constants::c;
}

}  // namespace ionclock
