#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "force_kernel.hpp"
#include "ionclock/crystal.hpp"
#include "ionclock/errors.hpp"

namespace ionclock {

namespace {
constexpr double fire_alpha_start = 0.1;
constexpr long fire_min_downhill = 5;
constexpr double fire_max_step_factor = 6.0;
}  // namespace

std::string to_string(SeedFamily f)
{
    switch (f) {
    case SeedFamily::icosahedral: return "icosahedral";
    case SeedFamily::bcc: return "bcc";
    case SeedFamily::external: return "external";
    }
    return "external";
}

SeedFamily seed_family_from_string(const std::string& s)
{
    if (s == "icosahedral") return SeedFamily::icosahedral;
    if (s == "bcc") return SeedFamily::bcc;
    if (s == "external") return SeedFamily::external;
    throw ValidationError("unknown seed family '" + s + "'");
}

void SolverParams::validate() const
{
    if (!(time_step > 0.0)) throw DomainError("solver: time_step must be positive");
    if (!(damping >= 0.0)) throw DomainError("solver: damping must be non-negative");
    if (!(force_tolerance > 0.0)) throw DomainError("solver: force_tolerance must be positive");
    if (max_steps < 1) throw DomainError("solver: max_steps must be at least 1");
    if (anneal_steps < 0) throw DomainError("solver: anneal_steps must be non-negative");
    if (!(jitter_fraction >= 0.0 && jitter_fraction <= 0.5)) {
        throw DomainError("solver: jitter_fraction must lie in [0, 0.5]");
    }
}

IonCrystal anneal(std::span<const Vec3> initial, const TrapConfig& trap,
                  const SolverParams& params, SeedFamily family, std::uint64_t rng_seed,
                  AnnealLog* log)
{
    params.validate();
    if (initial.empty()) throw DomainError("anneal: no ions");

    const LambdaMatrices lambdas = lambda_matrices(trap);
    const Mat3 k = lambdas.curvature();
    const std::size_t n = initial.size();

    std::vector<Vec3> r(initial.begin(), initial.end());
    std::vector<Vec3> v(n, Vec3::Zero());
    std::vector<Vec3> f;
    detail::ForceKernel kernel;

    // Returns potential energy and fills f.
    auto evaluate = [&]() {
        kernel.load(r);
        double e = kernel.coulomb(f);
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3 kr = k * r[i];
            f[i] -= kr;
            e += 0.5 * r[i].dot(kr);
        }
        return e;
    };

    IonCrystal out;
    out.seed_family = family;
    out.rng_seed = rng_seed;
    out.trap = trap;

    double potential = evaluate();
    double residual = max_force_norm(f);
    std::vector<Vec3> best = r;
    double best_residual = residual;

    // Phase 1: velocity Verlet with viscous damping -gamma v, applied as an
    // exact exponential decay over each half step.
    // Phase 2: FIRE (adaptive step, velocity mixed toward the force) to take
    // the slow, nearly flat modes of large crystals down to tolerance.
    double dt = params.time_step;
    const double dt_max = fire_max_step_factor * params.time_step;
    double half_decay = std::exp(-0.5 * params.damping * dt);
    double mix = fire_alpha_start;
    long downhill = 0;

    long step = 0;
    for (; step < params.max_steps && residual >= params.force_tolerance; ++step) {
        const bool fire = step >= params.anneal_steps;
        if (fire) {
            half_decay = 1.0;
            double power = 0.0, vnorm2 = 0.0, fnorm2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                power += f[i].dot(v[i]);
                vnorm2 += v[i].squaredNorm();
                fnorm2 += f[i].squaredNorm();
            }
            if (power > 0.0) {
                const double scale = std::sqrt(vnorm2 / fnorm2);
                for (std::size_t i = 0; i < n; ++i) v[i] = (1.0 - mix) * v[i] + mix * scale * f[i];
                if (++downhill > fire_min_downhill) {
                    dt = std::min(dt * 1.1, dt_max);
                    mix *= 0.99;
                }
            } else {
                for (auto& vi : v) vi.setZero();
                dt *= 0.5;
                mix = fire_alpha_start;
                downhill = 0;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = half_decay * v[i] + 0.5 * dt * f[i];
            r[i] += dt * v[i];
        }
        potential = evaluate();
        double kinetic = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = half_decay * (v[i] + 0.5 * dt * f[i]);
            kinetic += 0.5 * v[i].squaredNorm();
        }
        residual = max_force_norm(f);
        if (residual < best_residual) {
            best_residual = residual;
            best = r;
        }
        if (log) {
            log->energy.push_back(potential + kinetic);
            log->max_force.push_back(residual);
        }
    }
    if (log) log->steps = step;

    if (residual >= params.force_tolerance) {
        out.positions = std::move(best);
        out.residual = best_residual;
        throw ConvergenceError("anneal: force residual " + std::to_string(best_residual) +
                                   " above tolerance after " + std::to_string(step) + " steps",
                               std::move(out));
    }
    out.positions = std::move(r);
    out.residual = residual;
    return out;
}

IonCrystal solve_crystal(std::size_t n, SeedFamily family, std::uint64_t rng_seed,
                         const TrapConfig& trap, const SolverParams& params, AnnealLog* log)
{
    std::vector<Vec3> seed;
    switch (family) {
    case SeedFamily::icosahedral: seed = mackay_icosahedron_seed(n); break;
    case SeedFamily::bcc: seed = bcc_seed(n, default_bcc_lattice_constant()); break;
    case SeedFamily::external:
        throw DomainError("solve_crystal: external crystals are loaded, not seeded");
    }
    const auto jittered = apply_jitter(seed, params.jitter_fraction, rng_seed);
    return anneal(jittered, trap, params, family, rng_seed, log);
}

double crystal_moment(const IonCrystal& crystal, const Mat3& lambda_unit)
{
    if (crystal.positions.empty()) return 0.0;
    const Mat3 l2 = lambda_unit * lambda_unit;
    double sum = 0.0;
    for (const auto& r : crystal.positions) sum += r.dot(l2 * r);
    return sum / double(crystal.size());
}

double moment_law(std::size_t n)
{
    return 0.4 * std::pow(double(n), 2.0 / 3.0) - 0.3964;
}

double crystal_radius(const IonCrystal& crystal)
{
    double r2 = 0.0;
    for (const auto& r : crystal.positions) r2 = std::max(r2, r.squaredNorm());
    return std::sqrt(r2);
}

}  // namespace ionclock
