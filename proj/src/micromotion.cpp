#include "ionclock/micromotion.hpp"

#include <cmath>

#include "ionclock/errors.hpp"

namespace ionclock {

namespace {

// Q_ij v without forming Q_ij.
inline Vec3 apply_gradient(const Vec3& rij, double r2, const Vec3& v)
{
    const double inv = 1.0 / std::sqrt(r2);
    const double inv5 = inv * inv * inv * inv * inv;
    return -(3.0 * rij.dot(v) * rij - r2 * v) * inv5;
}

}  // namespace

void check_geometry(const IonCrystal& crystal, const TrapConfig& trap)
{
    constexpr double tol = 1e-9;
    if (std::abs(crystal.trap.a - trap.a) > tol || std::abs(crystal.trap.delta - trap.delta) > tol) {
        throw ValidationError("crystal was solved for a different trap geometry (a, delta)");
    }
}

PairKernels coulomb_pair_kernels(const IonCrystal& crystal, std::size_t i, std::size_t j)
{
    if (i == j) throw DomainError("coulomb_pair_kernels: i == j");
    const Vec3 rij = crystal.positions.at(i) - crystal.positions.at(j);
    const double r2 = rij.squaredNorm();
    if (r2 < 1e-20) throw SingularityError("coulomb_pair_kernels: coincident ions");
    const double r = std::sqrt(r2);
    PairKernels k;
    k.force = rij / (r2 * r);
    k.gradient = -(3.0 * rij * rij.transpose() - r2 * Mat3::Identity()) / (r2 * r2 * r);
    return k;
}

std::vector<Vec3> space_charge_w(const IonCrystal& crystal)
{
    const Mat3 lrf = lambda_matrices(crystal.trap).lambda_rf;
    const auto& R = crystal.positions;
    const std::size_t n = R.size();
    std::vector<Vec3> w(n, Vec3::Zero());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Vec3 rij = R[i] - R[j];
            const double r2 = rij.squaredNorm();
            if (r2 < 1e-20) throw SingularityError("space_charge_w: coincident ions");
            // Q_ij = Q_ji and R_ij = -R_ji, so the pair adds equal and opposite terms.
            const Vec3 t = apply_gradient(rij, r2, lrf * rij);
            w[i] += t;
            w[j] -= t;
        }
    }
    return w;
}

std::vector<Vec3> continuum_space_charge_w(const IonCrystal& crystal)
{
    const Mat3 lrf = lambda_matrices(crystal.trap).lambda_rf;
    std::vector<Vec3> w;
    w.reserve(crystal.size());
    for (const auto& r : crystal.positions) w.push_back(-0.2 * (lrf * r));
    return w;
}

FourierAmplitudes micromotion_amplitudes(const IonCrystal& crystal, const TrapConfig& trap,
                                         AmplitudeOrder order)
{
    check_geometry(crystal, trap);
    const LambdaMatrices lam = lambda_matrices(trap);
    const double eps = trap.epsilon();
    const std::size_t n = crystal.size();

    FourierAmplitudes amp;
    amp.order = order;
    amp.r2.resize(n);
    amp.r4.resize(n);
    for (std::size_t i = 0; i < n; ++i) amp.r2[i] = 0.25 * eps * (lam.lambda_rf * crystal.positions[i]);

    if (order == AmplitudeOrder::second) {
        const Mat3 a = lam.lambda_s + lam.lambda_rf * lam.lambda_rf / 16.0;
        const Mat3 factor = Mat3::Identity() + 0.25 * eps * eps * a;
        const auto w = space_charge_w(crystal);
        for (std::size_t i = 0; i < n; ++i) {
            amp.r2[i] = factor * amp.r2[i] - eps * eps * eps / 16.0 * w[i];
        }
    }
    for (std::size_t i = 0; i < n; ++i) amp.r4[i] = eps / 16.0 * (lam.lambda_rf * amp.r2[i]);
    return amp;
}

ShiftDistribution lowest_order_shift(const IonCrystal& crystal, const ClockSpecies& species,
                                     const TrapConfig& trap)
{
    check_geometry(crystal, trap);
    const Mat3 lrf = lambda_matrices(trap).lambda_rf;
    const Mat3 lrf2 = lrf * lrf;
    const double l = characteristic_length(species, trap.omega_z);
    const double x = trap.omega_z * l / (2.0 * constants::c);
    const double ratio = magic_ratio(species, trap);
    const double bracket = 1.0 - ratio * ratio;

    std::vector<double> shift;
    shift.reserve(crystal.size());
    for (const auto& r : crystal.positions) shift.push_back(-x * x * bracket * r.dot(lrf2 * r));
    return ShiftDistribution::from_samples(std::move(shift), "micromotion (lowest order)");
}

ShiftDistribution full_shift_linear_trap(const IonCrystal& crystal, const ClockSpecies& species,
                                         const TrapConfig& trap, LinearTrapShiftTerms* terms)
{
    check_geometry(crystal, trap);
    const auto w = space_charge_w(crystal);
    return full_shift_linear_trap(crystal, species, trap, w, terms);
}

ShiftDistribution full_shift_linear_trap(const IonCrystal& crystal, const ClockSpecies& species,
                                         const TrapConfig& trap, std::span<const Vec3> w0,
                                         LinearTrapShiftTerms* terms)
{
    check_geometry(crystal, trap);
    trap.validate();
    if (w0.size() != crystal.size()) throw DomainError("full_shift_linear_trap: W0 size mismatch");

    const Mat3 lam = lambda_matrices(trap).lambda_unit;
    const Mat3 lam2 = lam * lam;
    const double eps = trap.epsilon();
    const double e2 = eps * eps;
    const auto f = corrected_magic_factors(eps, trap.a);
    const double ratio = magic_ratio(species, trap);
    const double r2 = ratio * ratio;
    const double prefactor = micromotion_prefactor(species, trap);

    LinearTrapShiftTerms local;
    LinearTrapShiftTerms& t = terms ? *terms : local;
    const std::size_t n = crystal.size();
    t.magic_term.resize(n);
    t.delta_term.resize(n);
    t.w_term.resize(n);
    t.prefactor = prefactor;

    std::vector<double> shift(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& r = crystal.positions[i];
        t.magic_term[i] = (f.lambda0 - r2) * f.lambda1 * r.dot(lam2 * r);
        t.delta_term[i] = 0.5 * trap.delta * e2 * r.dot(lam * r);
        t.w_term[i] = -e2 / (2.0 * trap.a) * (1.0 - r2) * r.dot(lam * w0[i]);
        shift[i] = -prefactor * (t.magic_term[i] + t.delta_term[i] + t.w_term[i]);
    }
    return ShiftDistribution::from_samples(std::move(shift), "micromotion (linear trap)");
}

ShiftDistribution spherical_shift(const IonCrystal& crystal, const ClockSpecies& species,
                                  const TrapConfig& trap)
{
    if (!trap.spherical(1e-9)) {
        throw PreconditionError("spherical_shift: requires a = sqrt(3), delta = 0");
    }
    check_geometry(crystal, trap);
    trap.validate();
    const Mat3 lam = lambda_matrices(trap).lambda_unit;
    const Mat3 lam2 = lam * lam;
    const auto f = corrected_magic_factors(trap.epsilon(), trap.a);
    const double ratio = magic_ratio(species, trap);
    const double prefactor = micromotion_prefactor(species, trap);
    const double bracket = (f.lambda0_sph - ratio * ratio) * f.lambda1_sph;

    std::vector<double> shift;
    shift.reserve(crystal.size());
    for (const auto& r : crystal.positions) shift.push_back(-prefactor * bracket * r.dot(lam2 * r));
    return ShiftDistribution::from_samples(std::move(shift), "micromotion (spherical)");
}

double bessel_j0(double x)
{
    return std::cyl_bessel_j(0.0, std::abs(x));
}

ModulationIndex modulation_index(const IonCrystal& crystal, const Vec3& probe_wavevector,
                                 const ClockSpecies& species, const TrapConfig& trap)
{
    const auto amp = micromotion_amplitudes(crystal, trap, AmplitudeOrder::first);
    const double l = characteristic_length(species, trap.omega_z);
    ModulationIndex out;
    out.beta.reserve(crystal.size());
    out.rabi_reduction.reserve(crystal.size());
    for (const auto& r2 : amp.r2) {
        const double beta = 2.0 * l * probe_wavevector.dot(r2);
        out.beta.push_back(beta);
        out.rabi_reduction.push_back(bessel_j0(beta));
    }
    return out;
}

}  // namespace ionclock
