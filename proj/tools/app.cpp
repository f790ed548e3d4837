#include "app.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ionclock/errors.hpp"
#include "ionclock/micromotion.hpp"

namespace ionclock::app {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* output_format = "ionclock-output/1";
constexpr double vanishing_mean_threshold = 1e-20;

// Report plumbing ---------------------------------------------------------------

ordered_json config_json(const ScenarioConfig& cfg)
{
    ordered_json j = ordered_json::object();
    for (const auto& [section, kv] : config_entries(cfg)) j[section][kv.first] = kv.second;
    return j;
}

std::string text_header(const std::string& kind, const ScenarioConfig& cfg)
{
    std::ostringstream os;
    os << "# output_format = " << output_format << '\n';
    os << "# kind = " << kind << '\n';
    os << "# config_format = " << config_format_version << '\n';
    for (const auto& [section, kv] : config_entries(cfg)) {
        os << "# config." << section << '.' << kv.first << " = " << kv.second << '\n';
    }
    return os.str();
}

fs::path prepare_output(const ScenarioConfig& cfg)
{
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create output directory '" + cfg.output_dir + "'");
    return dir;
}

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw ValidationError("write failed for '" + path.string() + "'");
}

void write_json(const fs::path& path, const std::string& command, const ScenarioConfig& cfg,
                ordered_json results)
{
    ordered_json j;
    j["format"] = output_format;
    j["command"] = command;
    j["config"] = config_json(cfg);
    j["results"] = std::move(results);
    write_file(path, j.dump(2) + "\n");
}

void write_resolved_config(const fs::path& dir, const std::string& command, const ScenarioConfig& cfg)
{
    std::ostringstream os;
    write_scenario(os, cfg);
    write_file(dir / (command + ".config.ini"), os.str());
}

void write_per_ion(const fs::path& path, const std::string& kind, const ScenarioConfig& cfg,
                   const IonCrystal& crystal, const ShiftDistribution& d)
{
    std::ostringstream os;
    os << text_header(kind, cfg);
    os << "# label = " << d.label << '\n';
    os << "# unit = " << d.unit << '\n';
    os << "index,x,y,z,shift\n";
    for (std::size_t i = 0; i < crystal.size(); ++i) {
        const Vec3& r = crystal.positions[i];
        os << i << ',' << format_double(r.x()) << ',' << format_double(r.y()) << ','
           << format_double(r.z()) << ',' << format_double(d.per_ion[i]) << '\n';
    }
    write_file(path, os.str());
}

void write_hist(const fs::path& path, const std::string& kind, const ScenarioConfig& cfg,
                const ShiftDistribution& d)
{
    std::ostringstream os;
    os << text_header(kind, cfg);
    os << "# label = " << d.label << '\n';
    os << "# columns = bin_center_" << d.unit << " count\n";
    os << "# underflow = " << d.histogram.underflow << '\n';
    os << "# overflow = " << d.histogram.overflow << '\n';
    write_histogram(os, d.histogram);
    write_file(path, os.str());
}

void write_distribution(const fs::path& dir, const std::string& stem, const ScenarioConfig& cfg,
                        const IonCrystal& crystal, const ShiftDistribution& d)
{
    write_per_ion(dir / (stem + ".csv"), stem, cfg, crystal, d);
    write_hist(dir / (stem + "_hist.txt"), stem + " histogram", cfg, d);
}

ordered_json summary(const ShiftDistribution& d)
{
    ordered_json j;
    j["label"] = d.label;
    j["unit"] = d.unit;
    j["n"] = d.size();
    j["mean"] = d.mean;
    j["std"] = d.std;
    j["min"] = d.min;
    j["max"] = d.max;
    return j;
}

ordered_json trap_json(const ClockSpecies& species, const TrapConfig& trap)
{
    ordered_json j;
    j["omega_z_hz"] = trap.omega_z / two_pi;
    j["Omega_hz"] = trap.Omega / two_pi;
    j["Omega0_hz"] = magic_rf_frequency(species) / two_pi;
    j["Omega_over_Omega0"] = magic_ratio(species, trap);
    j["epsilon"] = trap.epsilon();
    j["a"] = trap.a;
    j["delta"] = trap.delta;
    j["length_scale_m"] = characteristic_length(species, trap.omega_z);
    j["micromotion_prefactor"] = micromotion_prefactor(species, trap);
    return j;
}

std::string crystal_stem(std::size_t n, SeedFamily family, std::uint64_t seed)
{
    return "crystal_N" + std::to_string(n) + "_" + to_string(family) + "_seed" + std::to_string(seed);
}

void save_crystal_with_config(const fs::path& path, const ScenarioConfig& cfg, const IonCrystal& c)
{
    std::ostringstream os;
    write_crystal(os, c);
    std::string body = os.str();
    // Config comments go after the crystal's own header so its format line stays first.
    const auto split = body.find("\n") + 1;
    body.insert(split, text_header("crystal", cfg));
    write_file(path, body);
}

// Crystal acquisition -------------------------------------------------------------

void check_trap_metadata(const IonCrystal& c, const TrapConfig& trap)
{
    check_geometry(c, trap);
    if (std::abs(c.trap.omega_z - trap.omega_z) > 1e-9 * trap.omega_z) {
        throw ValidationError("crystal was solved for omega_z/2pi = " +
                              format_double(c.trap.omega_z / two_pi) + " Hz, config has " +
                              format_double(trap.omega_z / two_pi) + " Hz");
    }
}

IonCrystal obtain_crystal(const ScenarioConfig& cfg, const TrapConfig& trap, std::ostream& log)
{
    if (!cfg.crystal_path.empty()) {
        IonCrystal c = load_crystal(cfg.crystal_path);
        check_trap_metadata(c, trap);
        log << "loaded " << c.size() << " ions from " << cfg.crystal_path << '\n';
        return c;
    }
    const std::size_t n = cfg.n_list.front();
    log << "solving N = " << n << " (" << to_string(cfg.seed_family) << ", seed " << cfg.seeds.front()
        << ")\n";
    return solve_crystal(n, cfg.seed_family, cfg.seeds.front(), trap, cfg.solver);
}

ShiftDistribution micromotion_distribution(const IonCrystal& c, const ClockSpecies& species,
                                           const TrapConfig& trap)
{
    return trap.spherical(1e-9) ? spherical_shift(c, species, trap)
                                : full_shift_linear_trap(c, species, trap);
}

BeamProfile resolve_beam(const ScenarioConfig& cfg, const IonCrystal& c, const ClockSpecies& species,
                         const TrapConfig& trap)
{
    const double l = characteristic_length(species, trap.omega_z);
    BeamProfile beam = compensation_beam(species, cfg.beam.waist_l * l);
    if (cfg.beam.power) {
        beam.power = *cfg.beam.power;
        return beam;
    }
    return optimize_compensation_power(c, species, trap, beam, cfg.beam.max_power);
}

}  // namespace

// Commands ------------------------------------------------------------------------

void cmd_solve(const ScenarioConfig& cfg, std::ostream& log)
{
    const fs::path dir = prepare_output(cfg);
    write_resolved_config(dir, "solve", cfg);
    const TrapConfig trap = cfg.trap();
    ordered_json runs = ordered_json::array();
    const Mat3 lam = lambda_matrices(trap).lambda_unit;

    for (std::size_t n : cfg.n_list) {
        for (std::uint64_t seed : cfg.seeds) {
            const std::string stem = crystal_stem(n, cfg.seed_family, seed);
            AnnealLog alog;
            auto write_log = [&](const std::string& name) {
                std::ostringstream os;
                os << text_header("convergence log", cfg);
                os << "step,energy,max_force\n";
                for (std::size_t k = 0; k < alog.energy.size(); ++k) {
                    os << k + 1 << ',' << format_double(alog.energy[k]) << ','
                       << format_double(alog.max_force[k]) << '\n';
                }
                write_file(dir / name, os.str());
            };
            IonCrystal c;
            try {
                c = solve_crystal(n, cfg.seed_family, seed, trap, cfg.solver, &alog);
            } catch (const ConvergenceError& e) {
                save_crystal_with_config(dir / (stem + "_partial.txt"), cfg, e.best());
                write_log("convergence_" + stem.substr(8) + "_partial.csv");
                throw;
            }
            save_crystal_with_config(dir / (stem + ".txt"), cfg, c);
            write_log("convergence_" + stem.substr(8) + ".csv");
            log << stem << ": " << alog.steps << " steps, residual " << c.residual << '\n';

            ordered_json r;
            r["file"] = stem + ".txt";
            r["n_ions"] = n;
            r["seed"] = seed;
            r["seed_family"] = to_string(cfg.seed_family);
            r["steps"] = alog.steps;
            r["residual"] = c.residual;
            r["potential_energy"] = potential_energy(c.positions, lambda_matrices(trap));
            r["radius"] = crystal_radius(c);
            r["moment"] = crystal_moment(c, lam);
            r["moment_law"] = moment_law(n);
            if (n >= 2) r["min_pair_distance"] = min_pair_distance(c.positions);
            runs.push_back(std::move(r));
        }
    }
    write_json(dir / "summary_solve.json", "solve", cfg, {{"runs", runs}});
}

void cmd_shifts(const ScenarioConfig& cfg, const RunOptions& opts, std::ostream& log)
{
    const fs::path dir = prepare_output(cfg);
    write_resolved_config(dir, "shifts", cfg);
    const ClockSpecies species = cfg.species();
    const TrapConfig trap = cfg.trap();
    const IonCrystal c = obtain_crystal(cfg, trap, log);

    ordered_json res;
    res["trap"] = trap_json(species, trap);
    res["n_ions"] = c.size();
    res["seed_family"] = to_string(c.seed_family);

    const auto mm = micromotion_distribution(c, species, trap);
    write_distribution(dir, "micromotion", cfg, c, mm);
    res["micromotion"] = summary(mm);
    res["micromotion"]["abs_mean_threshold"] = vanishing_mean_threshold;
    res["micromotion"]["abs_mean_below_threshold"] = std::abs(mm.mean) < vanishing_mean_threshold;

    const auto quad = quadrupole_shift_distribution(c, species, trap, cfg.field_orientation());
    write_distribution(dir, "quadrupole", cfg, c, quad);
    res["quadrupole"] = summary(quad);
    res["quadrupole"]["scale_hz"] = quadrupole_scale_hz(species, trap);
    res["quadrupole"]["fraction_below_0.02_hz"] = quad.fraction_below(0.02);

    if (opts.orientation_sweep) {
        const auto tensors = quadrupole_tensors(c);
        ordered_json sweep = ordered_json::array();
        double lo = INFINITY, hi = 0.0;
        for (const auto& o : orientation_sweep(cfg.orientation.sweep)) {
            const auto d = quadrupole_shift_distribution(tensors, species, trap, o);
            sweep.push_back({{"alpha_rad", o.alpha}, {"beta_rad", o.beta}, {"std_hz", d.std}});
            lo = std::min(lo, d.std);
            hi = std::max(hi, d.std);
        }
        res["orientation_sweep"] = {{"orientations", sweep},
                                    {"std_min_hz", lo},
                                    {"std_max_hz", hi},
                                    {"relative_spread", (hi - lo) / (0.5 * (hi + lo))}};
    }

    const auto raw = tensor_shift_distribution(c, species, trap);
    write_distribution(dir, "tensor_raw", cfg, c, raw);
    res["tensor_raw"] = summary(raw);

    if (opts.compensate) {
        const BeamProfile beam = resolve_beam(cfg, c, species, trap);
        const auto comp = compensated_tensor_distribution(c, species, trap, beam);
        write_distribution(dir, "tensor_compensated", cfg, c, comp);
        res["tensor_compensated"] = summary(comp);
        res["tensor_compensated"]["beam_power_w"] = beam.power;
        res["tensor_compensated"]["beam_waist_m"] = beam.waist;
        res["tensor_compensated"]["power_optimized"] = !cfg.beam.power.has_value();
        res["tensor_compensated"]["std_reduction"] = comp.std > 0.0 ? raw.std / comp.std : INFINITY;
    }
    write_json(dir / "summary_shifts.json", "shifts", cfg, res);
    log << "micromotion mean " << mm.mean << ", quadrupole std " << quad.std << " Hz\n";
}

void cmd_magic_scan(const ScenarioConfig& cfg, std::ostream& log)
{
    const std::set<std::size_t> distinct(cfg.n_list.begin(), cfg.n_list.end());
    if (distinct.size() < 2) throw ValidationError("magic-scan needs at least two distinct ion counts");
    const fs::path dir = prepare_output(cfg);
    write_resolved_config(dir, "magic-scan", cfg);
    const ClockSpecies species = cfg.species();
    const TrapConfig base = cfg.trap();
    const double omega0 = magic_rf_frequency(species);
    const bool spherical = base.spherical(1e-9);

    std::vector<std::size_t> ns(distinct.begin(), distinct.end());
    std::vector<IonCrystal> crystals;
    for (std::size_t n : ns) {
        log << "solving N = " << n << '\n';
        crystals.push_back(solve_crystal(n, cfg.seed_family, cfg.seeds.front(), base, cfg.solver));
    }
    std::vector<double> x;
    for (std::size_t n : ns) x.push_back(std::pow(double(n), 2.0 / 3.0));
    const double xbar = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    double sxx = 0.0;
    for (double v : x) sxx += (v - xbar) * (v - xbar);

    std::ostringstream csv;
    csv << text_header("magic scan", cfg);
    csv << "omega_hz,omega_over_omega0";
    for (std::size_t n : ns) csv << ",mean_N" << n;
    csv << ",slope\n";

    const int points = cfg.scan.points;
    std::vector<double> omegas, slopes;
    for (int k = 0; k < points; ++k) {
        const double rel = cfg.scan.omega_rel_min +
                           (cfg.scan.omega_rel_max - cfg.scan.omega_rel_min) * k / (points - 1);
        TrapConfig t = base;
        t.Omega = rel * omega0;
        std::vector<double> means;
        for (const auto& c : crystals) means.push_back(micromotion_distribution(c, species, t).mean);
        const double ybar = std::accumulate(means.begin(), means.end(), 0.0) / means.size();
        double sxy = 0.0;
        for (std::size_t i = 0; i < ns.size(); ++i) sxy += (x[i] - xbar) * (means[i] - ybar);
        const double slope = sxy / sxx;
        omegas.push_back(t.Omega);
        slopes.push_back(slope);
        csv << format_double(t.Omega / two_pi) << ',' << format_double(rel);
        for (double m : means) csv << ',' << format_double(m);
        csv << ',' << format_double(slope) << '\n';
    }
    write_file(dir / "scan.csv", csv.str());

    std::optional<double> crossing;
    for (int k = 0; k + 1 < points && !crossing; ++k) {
        if (slopes[k] == 0.0) {
            crossing = omegas[k];
        } else if ((slopes[k] < 0.0) != (slopes[k + 1] < 0.0) || slopes[k + 1] == 0.0) {
            const double f = slopes[k] / (slopes[k] - slopes[k + 1]);
            crossing = omegas[k] + f * (omegas[k + 1] - omegas[k]);
        }
    }
    if (!crossing) {
        throw RangeError("magic-scan: slope of mean shift vs N^(2/3) does not change sign on the grid");
    }
    const double predicted = corrected_magic_rf_frequency(species, base.omega_z, base.a, spherical);
    ordered_json res;
    res["ion_counts"] = ns;
    res["crossing_hz"] = *crossing / two_pi;
    res["crossing_over_omega0"] = *crossing / omega0;
    res["predicted_hz"] = predicted / two_pi;
    res["relative_difference"] = (*crossing - predicted) / predicted;
    res["omega0_hz"] = omega0 / two_pi;
    res["spherical"] = spherical;
    write_json(dir / "summary_magic_scan.json", "magic-scan", cfg, res);
    log << "zero crossing at " << *crossing / two_pi << " Hz\n";
}

void cmd_ramsey(const ScenarioConfig& cfg, std::ostream& log)
{
    const fs::path dir = prepare_output(cfg);
    write_resolved_config(dir, "ramsey", cfg);
    const ClockSpecies species = cfg.species();
    const TrapConfig trap = cfg.trap();
    const IonCrystal c = obtain_crystal(cfg, trap, log);

    const auto quad = quadrupole_shift_distribution(c, species, trap, cfg.field_orientation());
    const BeamProfile beam = resolve_beam(cfg, c, species, trap);
    const auto tensor = compensated_tensor_distribution(c, species, trap, beam);
    const auto combined =
        combine(quad, rescaled(tensor, species.clock_frequency, "Hz"), "quadrupole + compensated tensor");
    write_distribution(dir, "ramsey_shifts", cfg, c, combined);

    const double t = cfg.ramsey.free_precession;
    const auto r = ramsey_contrast(combined.per_ion, t);
    const double n = double(c.size());
    const double nu = species.clock_frequency;

    std::ostringstream curve;
    curve << text_header("ramsey contrast curve", cfg);
    curve << "# columns = free_precession_s contrast\n";
    for (int k = 0; k <= 40; ++k) {
        const double tk = 2.0 * t * k / 40.0;
        const double ck = k == 0 ? 1.0 : ramsey_contrast(combined.per_ion, tk).contrast;
        curve << format_double(tk) << ' ' << format_double(ck) << '\n';
    }
    write_file(dir / "ramsey_curve.txt", curve.str());

    ordered_json res;
    res["n_ions"] = c.size();
    res["free_precession_s"] = t;
    res["combined"] = summary(combined);
    res["quadrupole_std_hz"] = quad.std;
    res["tensor_std_hz"] = tensor.std;
    res["beam_power_w"] = beam.power;
    res["contrast"] = r.contrast;
    res["center_shift_hz"] = r.center_shift;
    res["gaussian_contrast"] =
        std::exp(-2.0 * std::numbers::pi * std::numbers::pi * combined.std * combined.std * t * t);
    res["stability_1s"] = projection_noise_stability(nu, n, t, 1.0);
    res["target_stability"] = cfg.ramsey.target_stability;
    res["time_to_target_s"] = averaging_time_to_target(nu, n, t, cfg.ramsey.target_stability);
    write_json(dir / "summary_ramsey.json", "ramsey", cfg, res);
    log << "contrast " << r.contrast << " at T = " << t << " s\n";
}

void cmd_budget(const ScenarioConfig& cfg, std::ostream& log)
{
    const fs::path dir = prepare_output(cfg);
    write_resolved_config(dir, "budget", cfg);
    const ClockSpecies species = cfg.species();
    const TrapConfig trap = cfg.trap();
    const IonCrystal c = obtain_crystal(cfg, trap, log);
    const auto rows = shift_budget(species, trap, c, cfg.environment());

    std::size_t width = 6;
    for (const auto& r : rows) width = std::max(width, r.effect.size());
    std::ostringstream table;
    table << text_header("budget", cfg);
    table << std::left << std::setw(int(width) + 2) << "Effect" << std::right << std::setw(16)
          << "Shift (1e-18)" << "  Inputs\n";
    ordered_json records = ordered_json::array();
    for (const auto& r : rows) {
        std::ostringstream value;
        std::string inputs;
        if (r.bound) {
            value << "bound";
            inputs = *r.bound;
        } else {
            value << std::fixed << std::setprecision(3) << r.fractional_shift / 1e-18;
        }
        for (const auto& [k, v] : r.inputs) inputs += (inputs.empty() ? "" : ", ") + k + "=" + format_double(v);
        table << std::left << std::setw(int(width) + 2) << r.effect << std::right << std::setw(16)
              << value.str() << "  " << inputs << '\n';

        ordered_json j;
        j["effect"] = r.effect;
        j["fractional_shift"] = r.fractional_shift;
        j["bound"] = r.bound ? ordered_json(*r.bound) : ordered_json(nullptr);
        j["inputs"] = ordered_json(r.inputs);
        if (r.distribution) j["distribution"] = summary(*r.distribution);
        records.push_back(std::move(j));
        if (r.distribution) {
            std::string stem = "budget_" + r.effect;
            std::transform(stem.begin(), stem.end(), stem.begin(),
                           [](unsigned char ch) { return ch == ' ' ? '_' : char(std::tolower(ch)); });
            write_hist(dir / (stem + "_hist.txt"), stem, cfg, *r.distribution);
        }
    }
    write_file(dir / "budget.txt", table.str());
    write_json(dir / "budget.json", "budget", cfg, {{"rows", records}});
    log << table.str().substr(text_header("budget", cfg).size());
}

void cmd_oracle(const ScenarioConfig& cfg, std::ostream& log)
{
    for (std::size_t n : cfg.n_list) {
        if (n > oracle_max_ions) {
            throw ValidationError("oracle supports at most " + std::to_string(oracle_max_ions) + " ions");
        }
    }
    const fs::path dir = prepare_output(cfg);
    write_resolved_config(dir, "oracle", cfg);
    const ClockSpecies species = cfg.species();
    const TrapConfig trap = cfg.trap();
    const double eps = trap.epsilon();
    const double pf = micromotion_prefactor(species, trap);

    ordered_json runs = ordered_json::array();
    for (std::size_t n : cfg.n_list) {
        IonCrystal c = solve_crystal(n, cfg.seed_family, cfg.seeds.front(), trap, cfg.solver);
        if (trap.spherical(1e-9)) c = symmetric_orientation(c);
        const auto rec = integrate_full_eom(c, trap, cfg.oracle);
        const IonCrystal m = oracle_mean_crystal(rec, c);
        const auto first = micromotion_amplitudes(m, trap, AmplitudeOrder::first);
        const auto second = micromotion_amplitudes(m, trap, AmplitudeOrder::second);
        const auto r2 = rec.real_part(rec.r2);
        const auto r4 = rec.real_part(rec.r4);
        const auto orc = oracle_time_dilation(rec, species, trap);
        const auto pert = full_shift_linear_trap(m, species, trap);

        double rmax = 0.0, e1 = 0.0, e2 = 0.0, e4 = 0.0, es = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            rmax = std::max(rmax, m.positions[i].norm());
            e1 = std::max(e1, (first.r2[i] - r2[i]).norm());
            e2 = std::max(e2, (second.r2[i] - r2[i]).norm());
            e4 = std::max(e4, (second.r4[i] - r4[i]).norm());
            es = std::max(es, std::abs(orc.per_ion[i] - pert.per_ion[i]));
        }
        const double scale = std::max(rmax, 1e-300);
        const double shift_scale = pf * std::max(rmax * rmax, 1e-300);

        std::ostringstream csv;
        csv << text_header("oracle comparison", cfg);
        csv << "index,x,y,z,oracle_shift,perturbative_shift\n";
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3& r = m.positions[i];
            csv << i << ',' << format_double(r.x()) << ',' << format_double(r.y()) << ','
                << format_double(r.z()) << ',' << format_double(orc.per_ion[i]) << ','
                << format_double(pert.per_ion[i]) << '\n';
        }
        write_file(dir / ("oracle_N" + std::to_string(n) + ".csv"), csv.str());

        ordered_json r;
        r["n_ions"] = n;
        r["periodicity_residual"] = rec.periodicity_residual;
        r["harmonic_residual"] = rec.harmonic_residual;
        r["r2_first_order_error"] = e1 / scale;
        r["r2_second_order_error"] = e2 / scale;
        r["r4_error"] = e4 / scale;
        r["shift_error"] = es / shift_scale;
        r["bound_eps3"] = eps * eps * eps;
        r["bound_eps4"] = eps * eps * eps * eps;
        r["r2_first_order_within_eps3"] = e1 / scale <= eps * eps * eps;
        r["r2_second_order_within_eps4"] = e2 / scale <= std::pow(eps, 4);
        r["r4_within_eps4"] = e4 / scale <= std::pow(eps, 4);
        r["shift_within_eps4"] = es / shift_scale <= std::pow(eps, 4);
        runs.push_back(std::move(r));
        log << "oracle N = " << n << ": shift error " << es / shift_scale << " (eps^4 = "
            << std::pow(eps, 4) << ")\n";
    }
    write_json(dir / "summary_oracle.json", "oracle", cfg,
               {{"trap", trap_json(species, trap)}, {"runs", runs}});
}

// Entry point -------------------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Ion-crystal optical clock simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::vector<std::size_t> n_list;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> omega_mode;
    std::optional<double> omega_value;
    std::optional<int> threads;
    std::optional<std::string> out_dir;
    std::optional<std::string> crystal;
    std::optional<double> temperature, field;
    RunOptions opts;

    app.add_option("--config", config_path, "Configuration file")->check(CLI::ExistingFile);
    app.add_option("--n", n_list, "Ion counts, comma separated")->delimiter(',');
    app.add_option("--seed", seed, "Jitter RNG seed");
    app.add_option("--omega-mode", omega_mode, "RF drive: absolute, magic or magic-corrected")
        ->check(CLI::IsMember({"absolute", "magic", "magic-corrected"}));
    app.add_option("--omega-value", omega_value,
                   "Omega/2pi in Hz (absolute) or multiple of Omega0 (magic)");
    app.add_option("--threads", threads, "Force-kernel threads, 0 = all cores");
    app.add_option("--out", out_dir, "Output directory");

    auto* solve = app.add_subcommand("solve", "Solve crystal equilibria");
    auto* shifts = app.add_subcommand("shifts", "Per-ion shift distributions");
    shifts->add_option("--crystal", crystal, "Crystal file from 'solve'")->check(CLI::ExistingFile);
    shifts->add_flag("--orientation-sweep", opts.orientation_sweep, "Quadrupole std over field orientations");
    shifts->add_flag("--compensate", opts.compensate, "Add the tensor compensation beam");
    auto* scan = app.add_subcommand("magic-scan", "Scan Omega for the N-independent magic point");
    auto* ramsey = app.add_subcommand("ramsey", "Ramsey contrast and stability");
    ramsey->add_option("--crystal", crystal, "Crystal file from 'solve'")->check(CLI::ExistingFile);
    auto* budget = app.add_subcommand("budget", "Systematic shift budget");
    budget->add_option("--crystal", crystal, "Crystal file from 'solve'")->check(CLI::ExistingFile);
    budget->add_option("--temperature", temperature, "Environment temperature, K");
    budget->add_option("--magnetic-field", field, "Bias field, T");
    auto* oracle = app.add_subcommand("oracle", "Time-domain check of the perturbative results");

    std::vector<std::string> argv_store{"ionclock"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_validation;
    }

    try {
        ScenarioConfig cfg = config_path.empty() ? ScenarioConfig{} : load_scenario(config_path);
        if (!n_list.empty()) cfg.n_list = n_list;
        if (seed) cfg.seeds = {*seed};
        if (omega_mode) cfg.omega_mode = omega_mode_from_string(*omega_mode);
        if (omega_value) cfg.omega_value = *omega_value;
        if (threads) cfg.threads = *threads;
        if (out_dir) cfg.output_dir = *out_dir;
        if (crystal) cfg.crystal_path = *crystal;
        if (temperature) cfg.temperature = *temperature;
        if (field) cfg.magnetic_field = *field;
        cfg.validate();
        set_thread_count(cfg.threads);

        if (solve->parsed()) cmd_solve(cfg, out);
        else if (shifts->parsed()) cmd_shifts(cfg, opts, out);
        else if (scan->parsed()) cmd_magic_scan(cfg, out);
        else if (ramsey->parsed()) cmd_ramsey(cfg, out);
        else if (budget->parsed()) cmd_budget(cfg, out);
        else if (oracle->parsed()) cmd_oracle(cfg, out);
        return exit_ok;
    } catch (const ConvergenceError& e) {
        err << "convergence error: " << e.what() << '\n';
        return exit_convergence;
    } catch (const RangeError& e) {
        err << "range error: " << e.what() << '\n';
        return exit_range;
    } catch (const InstabilityError& e) {
        err << "instability: " << e.what() << '\n';
        return exit_instability;
    } catch (const SingularityError& e) {
        err << "instability: " << e.what() << '\n';
        return exit_instability;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::invalid_argument& e) {  // DomainError and friends
        err << "validation error: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::logic_error& e) {  // PreconditionError, SignError
        err << "validation error: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
}

}  // namespace ionclock::app
