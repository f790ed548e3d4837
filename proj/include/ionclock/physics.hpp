#pragma once

#include <numbers>
#include <string>
#include <vector>

namespace ionclock {

/// CODATA 2018 values, SI units.
struct PhysicalConstants {
    static constexpr double c = 299792458.0;             // m/s
    static constexpr double h = 6.62607015e-34;          // J s
    static constexpr double hbar = h / (2.0 * std::numbers::pi);
    static constexpr double e = 1.602176634e-19;         // C
    static constexpr double epsilon0 = 8.8541878128e-12; // F/m
    static constexpr double a0 = 5.29177210903e-11;      // m
    static constexpr double u = 1.66053906660e-27;       // kg
    static constexpr double kB = 1.380649e-23;           // J/K
};

using constants = PhysicalConstants;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// 4 pi eps0 a0^3, the atomic unit of polarisability in C^2 m^2 / J.
constexpr double polarisability_au_si()
{
    return 4.0 * std::numbers::pi * constants::epsilon0 * constants::a0 * constants::a0 *
           constants::a0;
}

constexpr double au_to_si_polarisability(double alpha_au)
{
    return alpha_au * polarisability_au_si();
}

constexpr double si_to_au_polarisability(double alpha_si)
{
    return alpha_si / polarisability_au_si();
}

/*!
Atomic data for a clock candidate. Everything is SI; the factory functions
and the config loader take the conventional units (a.u., nm, MHz) and
convert once.
*/
struct ClockSpecies {
    std::string name;
    double mass = 0.0;                    // kg
    double charge = 0.0;                  // C
    double clock_frequency = 0.0;         // Hz
    double clock_wavelength = 0.0;        // m
    double delta_alpha_static = 0.0;      // C^2 m^2 / J
    double alpha2_dc = 0.0;               // C^2 m^2 / J
    double quadrupole_moment = 0.0;       // C m^2
    double alpha2_magic = 0.0;            // C^2 m^2 / J, at the compensation wavelength
    double magic_compensation_wavelength = 0.0;  // m
    double cooling_linewidth = 0.0;       // rad/s
    double quadratic_zeeman_coefficient = 0.0;  // Hz / T^2
    std::vector<double> hyperfine_factors;

    /// Throws ValidationError if any field is non-physical or nu != c/lambda.
    void validate() const;
};

/// Inputs in the units atomic-structure tables use.
struct SpeciesInputs {
    std::string name;
    double mass_u = 0.0;
    double charge_e = 1.0;
    double clock_wavelength_nm = 0.0;
    double delta_alpha_au = 0.0;
    double alpha2_dc_au = 0.0;
    double quadrupole_moment_ea02 = 0.0;
    double alpha2_magic_au = 0.0;
    double magic_compensation_wavelength_nm = 0.0;
    double cooling_linewidth_mhz = 0.0;  // Gamma / 2 pi
    double quadratic_zeeman_hz_per_mt2 = 0.0;
    std::vector<double> hyperfine_factors;
};

ClockSpecies make_species(const SpeciesInputs& in);

/// Singly ionised lutetium-176 with its 848 nm 1S0 - 3D1 clock transition.
ClockSpecies lu176_species();
SpeciesInputs lu176_inputs();

}  // namespace ionclock
