#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ionclock/trap.hpp"

namespace ionclock {

enum class SeedFamily { icosahedral, bcc, external };

std::string to_string(SeedFamily f);
SeedFamily seed_family_from_string(const std::string& s);

/*!
Equilibrium ion positions in units of the characteristic length l, together
with where they came from. `residual` is the largest per-ion pseudo-potential
force at the returned positions.
*/
struct IonCrystal {
    std::vector<Vec3> positions;
    SeedFamily seed_family = SeedFamily::external;
    std::uint64_t rng_seed = 0;
    double residual = 0.0;
    TrapConfig trap;

    std::size_t size() const { return positions.size(); }
};

struct SolverParams {
    double time_step = 0.05;       // units of 1/omega_z
    double damping = 1.0;          // units of omega_z
    double force_tolerance = 1e-9;
    long max_steps = 200000;
    long anneal_steps = 2000;      // viscous phase before the FIRE polish
    double jitter_fraction = 0.1;

    void validate() const;
};

/// Per-run diagnostics from anneal().
struct AnnealLog {
    long steps = 0;
    std::vector<double> energy;     // total (kinetic + potential) after each step
    std::vector<double> max_force;  // after each step
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, IonCrystal best)
        : std::runtime_error(what), best_(std::move(best)) {}
    const IonCrystal& best() const { return best_; }

private:
    IonCrystal best_;
};

// Seeds ----------------------------------------------------------------------

/// In-shell nearest-neighbour spacing of the icosahedral seed. Shells are
/// 0.951 times this apart radially.
inline constexpr double mackay_spacing = 1.5;

/*!
First n sites of a multi-shell Mackay icosahedron: the centre, then shell
k = 1, 2, ... each holding 10k^2 + 2 sites. Within a shell sites are listed
as vertices, then edge interiors, then face interiors, so a partially filled
outer shell is still deterministic.
*/
std::vector<Vec3> mackay_icosahedron_seed(std::size_t n);

/// Cube edge giving the continuum density 3/(4 pi): (8 pi / 3)^(1/3).
double default_bcc_lattice_constant();

/// n bcc sites nearest the origin (a body-centre site), cube axes along
/// x, y, z. Ties broken by (radius, x, y, z).
std::vector<Vec3> bcc_seed(std::size_t n, double lattice_constant);

double min_pair_distance(std::span<const Vec3> positions);

/// Adds uniform offsets in [-f d_min, f d_min] to every coordinate.
std::vector<Vec3> apply_jitter(std::span<const Vec3> positions, double fraction,
                               std::uint64_t seed);

// Forces and energy ------------------------------------------------------------

/// Scaled pseudo-potential force: -(Lambda_s + Lambda_rf^2/2) r_i + sum_j r_ij / |r_ij|^3.
std::vector<Vec3> scaled_force(std::span<const Vec3> positions, const LambdaMatrices& lambdas);

/// Trap + Coulomb energy in the same units.
double potential_energy(std::span<const Vec3> positions, const LambdaMatrices& lambdas);

double max_force_norm(std::span<const Vec3> forces);

/// Number of threads used by the force kernels; 0 selects all cores.
void set_thread_count(int n);
int thread_count();

// Solver -------------------------------------------------------------------------

/*!
Damped second-order relaxation of `initial` in the pseudo-potential of
`trap` until the largest force drops below params.force_tolerance.
Throws ConvergenceError (carrying the lowest-force state seen) after
params.max_steps.
*/
IonCrystal anneal(std::span<const Vec3> initial, const TrapConfig& trap,
                  const SolverParams& params, SeedFamily family = SeedFamily::external,
                  std::uint64_t rng_seed = 0, AnnealLog* log = nullptr);

/// Seed, jitter and anneal in one call.
IonCrystal solve_crystal(std::size_t n, SeedFamily family, std::uint64_t rng_seed,
                         const TrapConfig& trap, const SolverParams& params,
                         AnnealLog* log = nullptr);

/// Mean over ions of R^T M^2 R; M is normally the unit RF matrix Lambda.
double crystal_moment(const IonCrystal& crystal, const Mat3& lambda_unit);

/// Empirical fit of the moment for a spherical crystal: (2/5) N^(2/3) - 0.3964.
double moment_law(std::size_t n);

double crystal_radius(const IonCrystal& crystal);

// Text I/O -----------------------------------------------------------------------

inline constexpr const char* crystal_format_version = "ionclock-crystal/1";

/// Header of '#'-comments (N, seed family, rng seed, residual, trap) then
/// "x y z" per ion, 17 significant digits.
void write_crystal(std::ostream& os, const IonCrystal& crystal);
IonCrystal read_crystal(std::istream& is);

void save_crystal(const std::string& path, const IonCrystal& crystal);
IonCrystal load_crystal(const std::string& path);

}  // namespace ionclock
