#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ionclock/crystal.hpp"
#include "ionclock/metrics.hpp"
#include "ionclock/multipole.hpp"
#include "ionclock/oracle.hpp"
#include "ionclock/physics.hpp"

namespace ionclock {

inline constexpr const char* config_format_version = "ionclock-config/1";

/// How the RF drive frequency is chosen.
enum class OmegaMode {
    absolute,         // value is Omega / 2 pi in Hz
    magic,            // value is a multiple of Omega0
    magic_corrected,  // Omega0 sqrt(lambda0'), value ignored
};

std::string to_string(OmegaMode m);
OmegaMode omega_mode_from_string(const std::string& s);

struct BeamSettings {
    double waist_l = 100.0;             // units of l
    std::optional<double> power;        // W; unset means optimise
    double max_power = 1e3;             // W, optimiser bound
};

struct ScanSettings {
    double omega_rel_min = 0.9995;      // grid over Omega / Omega0
    double omega_rel_max = 1.0005;
    int points = 41;
};

struct OrientationSettings {
    double alpha_deg = 0.0;
    double beta_deg = 0.0;
    int sweep = 10;                     // orientations in the --orientation-sweep report
};

struct RamseySettings {
    double free_precession = 1.0;       // s
    double target_stability = 1e-18;
};

/*!
Everything a CLI run needs. Species fields are kept in table units
(SpeciesInputs) and converted when `species()` is called; frequencies are
stored in Hz exactly as written in the file.
*/
struct ScenarioConfig {
    std::string species_builtin = "lu176";  // "" for a fully user-defined species
    SpeciesInputs species_inputs = lu176_inputs();

    double omega_z_hz = 200e3;
    double a = 1.7320508075688772;
    double delta = 0.0;
    OmegaMode omega_mode = OmegaMode::magic_corrected;
    double omega_value = 1.0;

    SolverParams solver;
    std::vector<std::size_t> n_list{1000};
    std::vector<std::uint64_t> seeds{1};
    SeedFamily seed_family = SeedFamily::icosahedral;
    int threads = 0;

    BeamSettings beam;
    ScanSettings scan;
    OrientationSettings orientation;
    double temperature = 300.0;         // K
    double magnetic_field = 10e-6;      // T
    RamseySettings ramsey;
    OracleParams oracle;

    std::string crystal_path;           // optional input crystal
    std::string output_dir = "out";

    ClockSpecies species() const;
    /// Trap with Omega resolved according to omega_mode.
    TrapConfig trap() const;
    FieldOrientation field_orientation() const;
    Environment environment() const;
    /// Throws ValidationError on any inconsistent or missing input.
    void validate() const;
};

/// Ordered (section, key, value) triples: the resolved configuration as text.
using ConfigEntries = std::vector<std::pair<std::string, std::pair<std::string, std::string>>>;
ConfigEntries config_entries(const ScenarioConfig& cfg);

/// INI-style file: [section] headers, key = value lines, ';' or '#' comments.
ScenarioConfig parse_scenario(std::istream& is);
ScenarioConfig load_scenario(const std::string& path);
void write_scenario(std::ostream& os, const ScenarioConfig& cfg);

/// Shortest text that reads back to the same double.
std::string format_double(double x);

}  // namespace ionclock
