#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "ionclock/crystal.hpp"
#include "ionclock/errors.hpp"

namespace ionclock {

namespace {

std::string format_double(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

double parse_double(const std::string& s, const std::string& what)
{
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("crystal file: bad number for " + what + ": '" + s + "'");
    }
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void write_crystal(std::ostream& os, const IonCrystal& crystal)
{
    os << "# format = " << crystal_format_version << '\n'
       << "# n_ions = " << crystal.size() << '\n'
       << "# seed_family = " << to_string(crystal.seed_family) << '\n'
       << "# rng_seed = " << crystal.rng_seed << '\n'
       << "# residual = " << format_double(crystal.residual) << '\n'
       << "# trap.omega_z_rad_s = " << format_double(crystal.trap.omega_z) << '\n'
       << "# trap.Omega_rad_s = " << format_double(crystal.trap.Omega) << '\n'
       << "# trap.a = " << format_double(crystal.trap.a) << '\n'
       << "# trap.delta = " << format_double(crystal.trap.delta) << '\n'
       << "# columns = x y z (units of l)\n";
    os << std::setprecision(17);
    for (const auto& r : crystal.positions) os << r[0] << ' ' << r[1] << ' ' << r[2] << '\n';
}

IonCrystal read_crystal(std::istream& is)
{
    std::map<std::string, std::string> header;
    IonCrystal c;
    std::string line;
    while (std::getline(is, line)) {
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            const auto eq = t.find('=');
            if (eq != std::string::npos) header[trim(t.substr(1, eq - 1))] = trim(t.substr(eq + 1));
            continue;
        }
        std::istringstream row(t);
        std::string xs, ys, zs, extra;
        if (!(row >> xs >> ys >> zs) || (row >> extra)) {
            throw ValidationError("crystal file: expected three columns, got '" + t + "'");
        }
        c.positions.emplace_back(parse_double(xs, "x"), parse_double(ys, "y"), parse_double(zs, "z"));
    }

    auto require = [&header](const std::string& key) {
        const auto it = header.find(key);
        if (it == header.end()) throw ValidationError("crystal file: missing header '" + key + "'");
        return it->second;
    };
    if (require("format") != crystal_format_version) {
        throw ValidationError("crystal file: unsupported format '" + header["format"] + "'");
    }
    const auto n = static_cast<std::size_t>(parse_double(require("n_ions"), "n_ions"));
    if (n != c.positions.size()) {
        throw ValidationError("crystal file: header says " + std::to_string(n) + " ions, found " +
                              std::to_string(c.positions.size()));
    }
    c.seed_family = seed_family_from_string(require("seed_family"));
    c.rng_seed = std::stoull(require("rng_seed"));
    c.residual = parse_double(require("residual"), "residual");
    c.trap.omega_z = parse_double(require("trap.omega_z_rad_s"), "trap.omega_z_rad_s");
    c.trap.Omega = parse_double(require("trap.Omega_rad_s"), "trap.Omega_rad_s");
    c.trap.a = parse_double(require("trap.a"), "trap.a");
    c.trap.delta = parse_double(require("trap.delta"), "trap.delta");
    return c;
}

void save_crystal(const std::string& path, const IonCrystal& crystal)
{
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot write crystal file '" + path + "'");
    write_crystal(os, crystal);
}

IonCrystal load_crystal(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot read crystal file '" + path + "'");
    return read_crystal(is);
}

}  // namespace ionclock
