#include "ionclock/physics.hpp"

#include <cmath>
#include <sstream>

#include "ionclock/errors.hpp"

namespace ionclock {

void ClockSpecies::validate() const
{
    auto fail = [this](const std::string& what) {
        throw ValidationError("species '" + name + "': " + what);
    };
    if (!(mass > 0.0)) fail("mass must be positive");
    if (charge == 0.0) fail("charge must be non-zero");
    if (!(clock_wavelength > 0.0)) fail("clock wavelength must be positive");
    if (!(clock_frequency > 0.0)) fail("clock frequency must be positive");
    const double nu_from_lambda = constants::c / clock_wavelength;
    if (std::abs(clock_frequency / nu_from_lambda - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "clock frequency " << clock_frequency << " Hz inconsistent with wavelength";
        fail(os.str());
    }
    if (cooling_linewidth < 0.0) fail("cooling linewidth must be non-negative");
    if (hyperfine_factors.empty()) fail("at least one hyperfine factor required");
}

ClockSpecies make_species(const SpeciesInputs& in)
{
    ClockSpecies s;
    s.name = in.name;
    s.mass = in.mass_u * constants::u;
    s.charge = in.charge_e * constants::e;
    s.clock_wavelength = in.clock_wavelength_nm * 1e-9;
    s.clock_frequency = s.clock_wavelength > 0.0 ? constants::c / s.clock_wavelength : 0.0;
    s.delta_alpha_static = au_to_si_polarisability(in.delta_alpha_au);
    s.alpha2_dc = au_to_si_polarisability(in.alpha2_dc_au);
    s.quadrupole_moment = in.quadrupole_moment_ea02 * constants::e * constants::a0 * constants::a0;
    s.alpha2_magic = au_to_si_polarisability(in.alpha2_magic_au);
    s.magic_compensation_wavelength = in.magic_compensation_wavelength_nm * 1e-9;
    s.cooling_linewidth = two_pi * in.cooling_linewidth_mhz * 1e6;
    s.quadratic_zeeman_coefficient = in.quadratic_zeeman_hz_per_mt2 * 1e6;  // (1 mT)^-2 = 1e6 T^-2
    s.hyperfine_factors = in.hyperfine_factors;
    s.validate();
    return s;
}

SpeciesInputs lu176_inputs()
{
    SpeciesInputs in;
    in.name = "Lu176+";
    in.mass_u = 175.9426897;
    in.charge_e = 1.0;
    in.clock_wavelength_nm = 848.0;
    in.delta_alpha_au = -2.19;
    in.alpha2_dc_au = -5.0;
    in.quadrupole_moment_ea02 = -1.3;
    in.alpha2_magic_au = 100.0;
    in.magic_compensation_wavelength_nm = 615.0;
    in.cooling_linewidth_mhz = 2.45;
    in.quadratic_zeeman_hz_per_mt2 = 5.0;
    // m_F = 0 levels of 3D1, F = 6, 7, 8
    in.hyperfine_factors = {-2.0 / 5.0, 1.0, -3.0 / 5.0};
    return in;
}

ClockSpecies lu176_species()
{
    return make_species(lu176_inputs());
}

}  // namespace ionclock
