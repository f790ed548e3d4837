#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ionclock/crystal.hpp"
#include "ionclock/distribution.hpp"
#include "ionclock/multipole.hpp"
#include "ionclock/physics.hpp"

namespace ionclock {

struct RamseyResult {
    double free_precession_time = 0.0;  // s
    double contrast = 0.0;
    double center_shift = 0.0;          // Hz
};

/// Dephasing average |<exp(2 pi i delta_i T)>| over per-ion detunings (Hz).
RamseyResult ramsey_contrast(std::span<const double> shifts_hz, double free_precession_time);

/// Projection-noise limit 1 / (2 pi nu0 sqrt(N T tau)).
double projection_noise_stability(double nu0, double n_ions, double free_precession_time,
                                  double tau);

/// tau at which projection_noise_stability reaches target_sigma.
double averaging_time_to_target(double nu0, double n_ions, double free_precession_time,
                                double target_sigma);

/// Room-temperature blackbody rms field, V/m.
inline constexpr double bbr_field_300k = 831.9;

/// -Delta alpha <E^2>_BBR / (2 h nu), <E^2> = (831.9 V/m)^2 (T / 300 K)^4.
double bbr_shift(const ClockSpecies& species, double temperature);

/// Second-order Doppler at the Doppler limit T_D = hbar Gamma / 2 kB:
/// -n_modes kB T_D / (2 m c^2).
double secular_doppler_shift(const ClockSpecies& species, int n_modes = 3);

/// -coefficient B^2 / nu.
double quadratic_zeeman_shift(const ClockSpecies& species, double field);

struct Environment {
    double temperature = 300.0;     // K
    double magnetic_field = 10e-6;  // T
    FieldOrientation orientation;   // quantisation axis for the quadrupole row
};

struct BudgetEntry {
    std::string effect;
    double fractional_shift = 0.0;
    std::optional<std::string> bound;  // set for rows reported only as a bound
    std::map<std::string, double> inputs;
    std::optional<ShiftDistribution> distribution;  // pre-averaging per-ion values
};

/*!
Systematic budget in the order BBR, secular Doppler, micromotion,
quadrupole, quadratic Zeeman, probe AC Stark. Micromotion is the mean of the
spherical-trap shift at the configured drive (the linear-trap form for
non-spherical traps); the quadrupole row is the hyperfine average over the
species' C factors. The probe AC Stark row carries only the tabulated bound.
*/
std::vector<BudgetEntry> shift_budget(const ClockSpecies& species, const TrapConfig& trap,
                                      const IonCrystal& crystal, const Environment& env);

}  // namespace ionclock
