#include "ionclock/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ionclock/errors.hpp"

namespace ionclock {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string where(const std::string& section, const std::string& key)
{
    return "[" + section + "] " + key;
}

double to_double(const std::string& text, const std::string& ctx)
{
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw ValidationError(ctx + ": expected a number, got '" + text + "'");
    }
    return v;
}

template <typename Int>
Int to_integer(const std::string& text, const std::string& ctx)
{
    const std::string t = trim(text);
    Int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw ValidationError(ctx + ": expected an integer, got '" + text + "'");
    }
    return v;
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, F fmt)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt(v[i]);
    }
    return out;
}

bool is_nonneg_finite(double x) { return std::isfinite(x) && x >= 0.0; }

using Setter = std::function<void(ScenarioConfig&, const std::string&, const std::string&)>;

#define NUM(field) [](ScenarioConfig& c, const std::string& v, const std::string& ctx) { c.field = to_double(v, ctx); }

const std::map<std::string, std::map<std::string, Setter>>& setters()
{
    static const std::map<std::string, std::map<std::string, Setter>> table = {
        {"species",
         {
             {"builtin", {}},  // handled before the other fields
             {"name", [](ScenarioConfig& c, const std::string& v, const std::string&) {
                  c.species_inputs.name = trim(v);
              }},
             {"mass_u", NUM(species_inputs.mass_u)},
             {"charge_e", NUM(species_inputs.charge_e)},
             {"clock_wavelength_nm", NUM(species_inputs.clock_wavelength_nm)},
             {"delta_alpha_au", NUM(species_inputs.delta_alpha_au)},
             {"alpha2_dc_au", NUM(species_inputs.alpha2_dc_au)},
             {"quadrupole_moment_ea02", NUM(species_inputs.quadrupole_moment_ea02)},
             {"alpha2_magic_au", NUM(species_inputs.alpha2_magic_au)},
             {"magic_compensation_wavelength_nm", NUM(species_inputs.magic_compensation_wavelength_nm)},
             {"cooling_linewidth_mhz", NUM(species_inputs.cooling_linewidth_mhz)},
             {"quadratic_zeeman_hz_per_mt2", NUM(species_inputs.quadratic_zeeman_hz_per_mt2)},
             {"hyperfine_factors", [](ScenarioConfig& c, const std::string& v, const std::string& ctx) {
                  c.species_inputs.hyperfine_factors.clear();
                  for (const auto& item : split_list(v)) {
                      c.species_inputs.hyperfine_factors.push_back(to_double(item, ctx));
                  }
              }},
         }},
        {"trap",
         {
             {"omega_z_hz", NUM(omega_z_hz)},
             {"a", NUM(a)},
             {"delta", NUM(delta)},
             {"omega_mode", [](ScenarioConfig& c, const std::string& v, const std::string&) {
                  c.omega_mode = omega_mode_from_string(trim(v));
              }},
             {"omega_value", NUM(omega_value)},
         }},
        {"solver",
         {
             {"n", [](ScenarioConfig& c, const std::string& v, const std::string& ctx) {
                  c.n_list.clear();
                  for (const auto& item : split_list(v)) c.n_list.push_back(to_integer<std::size_t>(item, ctx));
              }},
             {"seeds", [](ScenarioConfig& c, const std::string& v, const std::string& ctx) {
                  c.seeds.clear();
                  for (const auto& item : split_list(v)) c.seeds.push_back(to_integer<std::uint64_t>(item, ctx));
              }},
             {"seed_family", [](ScenarioConfig& c, const std::string& v, const std::string&) {
                  c.seed_family = seed_family_from_string(trim(v));
              }},
             {"time_step", NUM(solver.time_step)},
             {"damping", NUM(solver.damping)},
             {"force_tolerance", NUM(solver.force_tolerance)},
             {"max_steps", [](ScenarioConfig& c, const std::string& v, const std::string& ctx) {
                  c.solver.max_steps = to_integer<long>(v, ctx);
              }},
             {"anneal_steps", [](ScenarioConfig& c, const std::string& v, const std::string& ctx) {
                  c.solver.anneal_steps = to_integer<long>(v, ctx);
              }},
             {"jitter_fraction", NUM(solver.jitter_fraction)},
             {"threads", [](ScenarioConfig& c, const std::string& v, const std::string& ctx) {
                  c.threads = to_integer<int>(v, ctx);
              }},
             {"crystal", [](ScenarioConfig& c, const std::string& v, const std::string&) {
                  c.crystal_path = trim(v);
              }},
         }},
        {"beam",
         {
             {"waist_l", NUM(beam.waist_l)},
             {"power_w", [](ScenarioConfig& c, const std::string& v, const std::string& ctx) {
                  if (trim(v) == "auto") c.beam.power.reset();
                  else c.beam.power = to_double(v, ctx);
              }},
             {"max_power_w", NUM(beam.max_power)},
         }},
        {"scan",
         {
             {"omega_rel_min", NUM(scan.omega_rel_min)},
             {"omega_rel_max", NUM(scan.omega_rel_max)},
             {"points", [](ScenarioConfig& c, const std::string& v, const std::string& ctx) {
                  c.scan.points = to_integer<int>(v, ctx);
              }},
         }},
        {"orientation",
         {
             {"alpha_deg", NUM(orientation.alpha_deg)},
             {"beta_deg", NUM(orientation.beta_deg)},
             {"sweep", [](ScenarioConfig& c, const std::string& v, const std::string& ctx) {
                  c.orientation.sweep = to_integer<int>(v, ctx);
              }},
         }},
        {"environment",
         {
             {"temperature_k", NUM(temperature)},
             {"magnetic_field_t", NUM(magnetic_field)},
         }},
        {"ramsey",
         {
             {"free_precession_s", NUM(ramsey.free_precession)},
             {"target_stability", NUM(ramsey.target_stability)},
         }},
        {"oracle",
         {
             {"steps_per_cycle", [](ScenarioConfig& c, const std::string& v, const std::string& ctx) {
                  c.oracle.steps_per_cycle = to_integer<int>(v, ctx);
              }},
             {"transient_cycles", [](ScenarioConfig& c, const std::string& v, const std::string& ctx) {
                  c.oracle.transient_cycles = to_integer<int>(v, ctx);
              }},
             {"record_cycles", [](ScenarioConfig& c, const std::string& v, const std::string& ctx) {
                  c.oracle.record_cycles = to_integer<int>(v, ctx);
              }},
         }},
        {"output",
         {
             {"dir", [](ScenarioConfig& c, const std::string& v, const std::string&) {
                  c.output_dir = trim(v);
              }},
         }},
    };
    return table;
}

#undef NUM

}  // namespace

std::string to_string(OmegaMode m)
{
    switch (m) {
    case OmegaMode::absolute: return "absolute";
    case OmegaMode::magic: return "magic";
    case OmegaMode::magic_corrected: return "magic-corrected";
    }
    return "?";
}

OmegaMode omega_mode_from_string(const std::string& s)
{
    if (s == "absolute") return OmegaMode::absolute;
    if (s == "magic") return OmegaMode::magic;
    if (s == "magic-corrected") return OmegaMode::magic_corrected;
    throw ValidationError("unknown omega mode '" + s + "' (absolute, magic, magic-corrected)");
}

std::string format_double(double x)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
}

ClockSpecies ScenarioConfig::species() const
{
    return make_species(species_inputs);
}

TrapConfig ScenarioConfig::trap() const
{
    TrapConfig t;
    t.omega_z = two_pi * omega_z_hz;
    t.a = a;
    t.delta = delta;
    switch (omega_mode) {
    case OmegaMode::absolute: t.Omega = two_pi * omega_value; break;
    case OmegaMode::magic: t.Omega = omega_value * magic_rf_frequency(species()); break;
    case OmegaMode::magic_corrected:
        t.Omega = corrected_magic_rf_frequency(species(), t.omega_z, a, t.spherical());
        break;
    }
    return t;
}

FieldOrientation ScenarioConfig::field_orientation() const
{
    constexpr double deg = std::numbers::pi / 180.0;
    return {orientation.alpha_deg * deg, orientation.beta_deg * deg};
}

Environment ScenarioConfig::environment() const
{
    Environment env;
    env.temperature = temperature;
    env.magnetic_field = magnetic_field;
    env.orientation = field_orientation();
    return env;
}

void ScenarioConfig::validate() const
{
    species();  // validates the species record
    if (!(omega_z_hz > 0.0)) throw ValidationError("[trap] omega_z_hz must be positive");
    if (!(omega_value > 0.0)) throw ValidationError("[trap] omega_value must be positive");
    try {
        trap().validate();
        solver.validate();
        oracle.validate();
    } catch (const DomainError& e) {
        throw ValidationError(e.what());
    }
    if (n_list.empty()) throw ValidationError("[solver] n: at least one ion count required");
    for (auto n : n_list) {
        if (n < 1) throw ValidationError("[solver] n: ion counts must be >= 1");
    }
    if (seeds.empty()) throw ValidationError("[solver] seeds: at least one seed required");
    if (seed_family == SeedFamily::external) {
        throw ValidationError("[solver] seed_family must be icosahedral or bcc");
    }
    if (threads < 0) throw ValidationError("[solver] threads must be >= 0");
    if (!(beam.waist_l > 0.0)) throw ValidationError("[beam] waist_l must be positive");
    if (beam.power && !is_nonneg_finite(*beam.power)) throw ValidationError("[beam] power_w must be >= 0");
    if (!(beam.max_power > 0.0)) throw ValidationError("[beam] max_power_w must be positive");
    if (!(scan.omega_rel_min > 0.0 && scan.omega_rel_max > scan.omega_rel_min)) {
        throw ValidationError("[scan] need 0 < omega_rel_min < omega_rel_max");
    }
    if (scan.points < 2) throw ValidationError("[scan] points must be >= 2");
    if (orientation.sweep < 1) throw ValidationError("[orientation] sweep must be >= 1");
    if (!(temperature >= 0.0)) throw ValidationError("[environment] temperature_k must be >= 0");
    if (!std::isfinite(magnetic_field)) throw ValidationError("[environment] magnetic_field_t must be finite");
    if (!(ramsey.free_precession > 0.0)) throw ValidationError("[ramsey] free_precession_s must be positive");
    if (!(ramsey.target_stability > 0.0)) throw ValidationError("[ramsey] target_stability must be positive");
    if (!crystal_path.empty() && !std::filesystem::is_regular_file(crystal_path)) {
        throw ValidationError("[solver] crystal: no such file '" + crystal_path + "'");
    }
    if (output_dir.empty()) throw ValidationError("[output] dir must not be empty");
}

ConfigEntries config_entries(const ScenarioConfig& c)
{
    const auto& s = c.species_inputs;
    const auto d = [](double x) { return format_double(x); };
    const auto i = [](auto x) { return std::to_string(x); };
    ConfigEntries e;
    auto add = [&e](const char* section, const char* key, std::string value) {
        e.push_back({section, {key, std::move(value)}});
    };
    add("species", "builtin", c.species_builtin.empty() ? "none" : c.species_builtin);
    add("species", "name", s.name);
    add("species", "mass_u", d(s.mass_u));
    add("species", "charge_e", d(s.charge_e));
    add("species", "clock_wavelength_nm", d(s.clock_wavelength_nm));
    add("species", "delta_alpha_au", d(s.delta_alpha_au));
    add("species", "alpha2_dc_au", d(s.alpha2_dc_au));
    add("species", "quadrupole_moment_ea02", d(s.quadrupole_moment_ea02));
    add("species", "alpha2_magic_au", d(s.alpha2_magic_au));
    add("species", "magic_compensation_wavelength_nm", d(s.magic_compensation_wavelength_nm));
    add("species", "cooling_linewidth_mhz", d(s.cooling_linewidth_mhz));
    add("species", "quadratic_zeeman_hz_per_mt2", d(s.quadratic_zeeman_hz_per_mt2));
    add("species", "hyperfine_factors", join(s.hyperfine_factors, d));
    add("trap", "omega_z_hz", d(c.omega_z_hz));
    add("trap", "a", d(c.a));
    add("trap", "delta", d(c.delta));
    add("trap", "omega_mode", to_string(c.omega_mode));
    add("trap", "omega_value", d(c.omega_value));
    add("solver", "n", join(c.n_list, i));
    add("solver", "seeds", join(c.seeds, i));
    add("solver", "seed_family", to_string(c.seed_family));
    add("solver", "time_step", d(c.solver.time_step));
    add("solver", "damping", d(c.solver.damping));
    add("solver", "force_tolerance", d(c.solver.force_tolerance));
    add("solver", "max_steps", i(c.solver.max_steps));
    add("solver", "anneal_steps", i(c.solver.anneal_steps));
    add("solver", "jitter_fraction", d(c.solver.jitter_fraction));
    add("solver", "threads", i(c.threads));
    if (!c.crystal_path.empty()) add("solver", "crystal", c.crystal_path);
    add("beam", "waist_l", d(c.beam.waist_l));
    add("beam", "power_w", c.beam.power ? d(*c.beam.power) : "auto");
    add("beam", "max_power_w", d(c.beam.max_power));
    add("scan", "omega_rel_min", d(c.scan.omega_rel_min));
    add("scan", "omega_rel_max", d(c.scan.omega_rel_max));
    add("scan", "points", i(c.scan.points));
    add("orientation", "alpha_deg", d(c.orientation.alpha_deg));
    add("orientation", "beta_deg", d(c.orientation.beta_deg));
    add("orientation", "sweep", i(c.orientation.sweep));
    add("environment", "temperature_k", d(c.temperature));
    add("environment", "magnetic_field_t", d(c.magnetic_field));
    add("ramsey", "free_precession_s", d(c.ramsey.free_precession));
    add("ramsey", "target_stability", d(c.ramsey.target_stability));
    add("oracle", "steps_per_cycle", i(c.oracle.steps_per_cycle));
    add("oracle", "transient_cycles", i(c.oracle.transient_cycles));
    add("oracle", "record_cycles", i(c.oracle.record_cycles));
    add("output", "dir", c.output_dir);
    return e;
}

ScenarioConfig parse_scenario(std::istream& is)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }

    ScenarioConfig cfg;
    const auto& table = setters();
    for (const auto& [section, keys] : tree) {
        if (keys.empty() && !keys.data().empty()) {
            throw ValidationError("config: key '" + section + "' outside any section");
        }
        if (!table.count(section)) throw ValidationError("config: unknown section [" + section + "]");
    }

    // The built-in species goes first so that individual fields override it.
    if (const auto sp = tree.get_child_optional("species")) {
        if (const auto b = sp->get_optional<std::string>("builtin")) {
            const std::string name = trim(*b);
            if (name == "lu176") {
                cfg.species_builtin = "lu176";
                cfg.species_inputs = lu176_inputs();
            } else if (name == "none" || name.empty()) {
                cfg.species_builtin.clear();
                cfg.species_inputs = SpeciesInputs{};
            } else {
                throw ValidationError("[species] builtin: unknown species '" + name + "'");
            }
        }
    }

    for (const auto& [section, keys] : tree) {
        const auto& known = table.at(section);
        for (const auto& [key, node] : keys) {
            const auto it = known.find(key);
            if (it == known.end()) throw ValidationError("config: unknown key " + where(section, key));
            if (it->second) {
                try {
                    it->second(cfg, node.data(), where(section, key));
                } catch (const DomainError& e) {
                    throw ValidationError(where(section, key) + ": " + e.what());
                } catch (const std::invalid_argument& e) {
                    throw ValidationError(where(section, key) + ": " + e.what());
                }
            }
        }
    }
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    return parse_scenario(in);
}

void write_scenario(std::ostream& os, const ScenarioConfig& cfg)
{
    os << "; format = " << config_format_version << '\n';
    std::string section;
    for (const auto& [sec, kv] : config_entries(cfg)) {
        if (sec != section) {
            if (!section.empty()) os << '\n';
            os << '[' << sec << "]\n";
            section = sec;
        }
        os << kv.first << " = " << kv.second << '\n';
    }
}

}  // namespace ionclock
