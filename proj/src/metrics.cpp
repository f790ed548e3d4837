#include "ionclock/metrics.hpp"

#include <cmath>
#include <complex>

#include "ionclock/errors.hpp"
#include "ionclock/micromotion.hpp"

namespace ionclock {

RamseyResult ramsey_contrast(std::span<const double> shifts_hz, double free_precession_time)
{
    if (shifts_hz.empty()) throw DomainError("ramsey_contrast: no ions");
    if (!(free_precession_time > 0.0)) throw DomainError("ramsey_contrast: T must be positive");
    std::complex<double> sum = 0.0;
    for (double d : shifts_hz) sum += std::polar(1.0, two_pi * d * free_precession_time);
    sum /= double(shifts_hz.size());
    RamseyResult r;
    r.free_precession_time = free_precession_time;
    r.contrast = std::min(1.0, std::abs(sum));
    r.center_shift = std::arg(sum) / (two_pi * free_precession_time);
    return r;
}

double projection_noise_stability(double nu0, double n_ions, double free_precession_time,
                                  double tau)
{
    if (!(nu0 > 0.0 && n_ions > 0.0 && free_precession_time > 0.0 && tau > 0.0)) {
        throw DomainError("projection_noise_stability: arguments must be positive");
    }
    return 1.0 / (two_pi * nu0 * std::sqrt(n_ions * free_precession_time * tau));
}

double averaging_time_to_target(double nu0, double n_ions, double free_precession_time,
                                double target_sigma)
{
    if (!(target_sigma > 0.0)) throw DomainError("averaging_time_to_target: target must be positive");
    const double x = 1.0 / (two_pi * nu0 * std::sqrt(n_ions * free_precession_time) * target_sigma);
    return x * x;
}

double bbr_shift(const ClockSpecies& species, double temperature)
{
    if (temperature < 0.0) throw DomainError("bbr_shift: temperature must be non-negative");
    const double t = temperature / 300.0;
    const double e2 = bbr_field_300k * bbr_field_300k * t * t * t * t;
    return -species.delta_alpha_static * e2 / (2.0 * constants::h * species.clock_frequency);
}

double secular_doppler_shift(const ClockSpecies& species, int n_modes)
{
    if (species.cooling_linewidth < 0.0) throw DomainError("secular_doppler_shift: negative linewidth");
    const double t_doppler = constants::hbar * species.cooling_linewidth / (2.0 * constants::kB);
    const double mc2 = species.mass * constants::c * constants::c;
    return -double(n_modes) * constants::kB * t_doppler / (2.0 * mc2);
}

double quadratic_zeeman_shift(const ClockSpecies& species, double field)
{
    return -species.quadratic_zeeman_coefficient * field * field / species.clock_frequency;
}

std::vector<BudgetEntry> shift_budget(const ClockSpecies& species, const TrapConfig& trap,
                                      const IonCrystal& crystal, const Environment& env)
{
    std::vector<BudgetEntry> rows;

    rows.push_back({"Blackbody radiation", bbr_shift(species, env.temperature), std::nullopt,
                    {{"temperature_K", env.temperature}}, std::nullopt});

    rows.push_back({"Secular Doppler", secular_doppler_shift(species, 3), std::nullopt,
                    {{"cooling_linewidth_MHz", species.cooling_linewidth / two_pi / 1e6},
                     {"modes", 3.0}},
                    std::nullopt});

    {
        const auto mm = trap.spherical(1e-9) ? spherical_shift(crystal, species, trap)
                                             : full_shift_linear_trap(crystal, species, trap);
        rows.push_back({"Micromotion", mm.mean, std::nullopt,
                        {{"N", double(crystal.size())},
                         {"Omega_over_Omega0", magic_ratio(species, trap)},
                         {"epsilon", trap.epsilon()}},
                        mm});
    }

    {
        const auto quad = quadrupole_shift_distribution(crystal, species, trap, env.orientation);
        double averaged = 0.0;
        for (double s : quad.per_ion) averaged += hyperfine_average(species.hyperfine_factors, s);
        averaged /= double(quad.size());
        rows.push_back({"Quadrupole", averaged / species.clock_frequency, std::nullopt,
                        {{"N", double(crystal.size())},
                         {"euler_alpha", env.orientation.alpha},
                         {"euler_beta", env.orientation.beta}},
                        quad});
    }

    rows.push_back({"Quadratic Zeeman", quadratic_zeeman_shift(species, env.magnetic_field),
                    std::nullopt, {{"field_T", env.magnetic_field}}, std::nullopt});

    // No intensity model is available for the probe; only the tabulated bound.
    rows.push_back({"Probe AC Stark (200 ms pi-pulse)", 0.0, std::string("< 50e-18"), {},
                    std::nullopt});
    return rows;
}

}  // namespace ionclock
