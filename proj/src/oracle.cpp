#include "ionclock/oracle.hpp"

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "ionclock/errors.hpp"

namespace ionclock {

namespace {

struct State {
    std::vector<Vec3> r, v;
};

class RfDynamics {
public:
    RfDynamics(const TrapConfig& trap, const Vec3& static_field)
        : lam_(lambda_matrices(trap)), eps_(trap.epsilon()), e0_(static_field)
    {
    }

    double epsilon() const { return eps_; }

    void acceleration(const std::vector<Vec3>& r, const std::vector<Vec3>& v, double t,
                      double damping, std::vector<Vec3>& out) const
    {
        const std::size_t n = r.size();
        out.resize(n);
        const Mat3 k = eps_ * eps_ * lam_.lambda_s + 2.0 * eps_ * std::cos(2.0 * t) * lam_.lambda_rf;
        const Vec3 f0 = eps_ * eps_ * e0_;
        for (std::size_t i = 0; i < n; ++i) out[i] = f0 - (k * r[i]) - damping * v[i];
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const Vec3 rij = r[i] - r[j];
                const double r2 = rij.squaredNorm();
                if (r2 < 1e-20) throw SingularityError("oracle: coincident ions");
                const Vec3 f = eps_ * eps_ * rij / (r2 * std::sqrt(r2));
                out[i] += f;
                out[j] -= f;
            }
        }
    }

    /// Total field in units of m omega_z^2 l / q.
    Vec3 field(const std::vector<Vec3>& r, std::size_t i, double t) const
    {
        Vec3 e = -(2.0 / eps_) * std::cos(2.0 * t) * (lam_.lambda_rf * r[i]) - lam_.lambda_s * r[i] + e0_;
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (j == i) continue;
            const Vec3 rij = r[i] - r[j];
            const double r2 = rij.squaredNorm();
            e += rij / (r2 * std::sqrt(r2));
        }
        return e;
    }

    void rk4_step(State& s, double t, double h, double damping) const
    {
        const std::size_t n = s.r.size();
        std::vector<Vec3> a1, a2, a3, a4, rt(n), vt(n);
        acceleration(s.r, s.v, t, damping, a1);
        for (std::size_t i = 0; i < n; ++i) {
            rt[i] = s.r[i] + 0.5 * h * s.v[i];
            vt[i] = s.v[i] + 0.5 * h * a1[i];
        }
        std::vector<Vec3> v2 = vt;
        acceleration(rt, vt, t + 0.5 * h, damping, a2);
        for (std::size_t i = 0; i < n; ++i) {
            rt[i] = s.r[i] + 0.5 * h * v2[i];
            vt[i] = s.v[i] + 0.5 * h * a2[i];
        }
        std::vector<Vec3> v3 = vt;
        acceleration(rt, vt, t + 0.5 * h, damping, a3);
        for (std::size_t i = 0; i < n; ++i) {
            rt[i] = s.r[i] + h * v3[i];
            vt[i] = s.v[i] + h * a3[i];
        }
        std::vector<Vec3> v4 = vt;
        acceleration(rt, vt, t + h, damping, a4);
        for (std::size_t i = 0; i < n; ++i) {
            s.r[i] += h / 6.0 * (s.v[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]);
            s.v[i] += h / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
        }
    }

private:
    LambdaMatrices lam_;
    double eps_;
    Vec3 e0_;
};

Eigen::VectorXd pack(const State& s)
{
    const std::size_t n = s.r.size();
    Eigen::VectorXd x(6 * n);
    for (std::size_t i = 0; i < n; ++i) {
        x.segment<3>(3 * i) = s.r[i];
        x.segment<3>(3 * (n + i)) = s.v[i];
    }
    return x;
}

State unpack(const Eigen::VectorXd& x)
{
    const std::size_t n = x.size() / 6;
    State s{std::vector<Vec3>(n), std::vector<Vec3>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        s.r[i] = x.segment<3>(3 * i);
        s.v[i] = x.segment<3>(3 * (n + i));
    }
    return s;
}

void check_finite(const State& s, double bound)
{
    for (const auto& r : s.r) {
        if (!r.allFinite() || r.norm() > bound) {
            throw InstabilityError("oracle: trajectory diverged (RF drive outside the stable region?)");
        }
    }
}

}  // namespace

void OracleParams::validate() const
{
    if (steps_per_cycle < 200) throw DomainError("oracle: need at least 200 steps per RF cycle");
    if (record_cycles < 64) throw DomainError("oracle: need at least 64 recorded cycles");
    if (transient_cycles < 0) throw DomainError("oracle: transient_cycles must be non-negative");
}

std::vector<Vec3> TrajectoryRecord::real_part(const std::vector<CVec3>& v) const
{
    std::vector<Vec3> out;
    out.reserve(v.size());
    for (const auto& c : v) out.push_back(c.real());
    return out;
}

TrajectoryRecord integrate_full_eom(const IonCrystal& initial, const TrapConfig& trap,
                                    const OracleParams& params)
{
    params.validate();
    trap.validate();
    const std::size_t n = initial.size();
    if (n == 0 || n > oracle_max_ions) {
        throw DomainError("oracle: supports 1 to " + std::to_string(oracle_max_ions) + " ions");
    }

    const RfDynamics dyn(trap, params.static_field);
    const double eps = dyn.epsilon();
    const Mat3 lrf = lambda_matrices(trap).lambda_rf;
    const double h = std::numbers::pi / params.steps_per_cycle;
    const double gamma0 = params.damping < 0.0 ? eps : params.damping;

    double scale = 1.0;
    for (const auto& r : initial.positions) scale = std::max(scale, r.norm());
    const double bound = 1e3 * scale;

    // r(0) = R0 + 2 R2 with R2 = (eps/4) Lambda_rf R0, v(0) = 0.
    State s{initial.positions, std::vector<Vec3>(n, Vec3::Zero())};
    for (auto& r : s.r) r += 0.5 * eps * (lrf * r);

    // Damped transient; the damping falls linearly to zero so switching it off
    // does not kick the crystal.
    const long transient_steps = long(params.transient_cycles) * params.steps_per_cycle;
    for (long k = 0; k < transient_steps; ++k) {
        const double gamma = gamma0 * (1.0 - double(k) / double(transient_steps));
        dyn.rk4_step(s, k * h, h, gamma);
        if (k % params.steps_per_cycle == 0) check_finite(s, bound);
    }

    // Newton shooting on the one-period return map. Every period starts at t = 0
    // (mod pi), so the map is autonomous.
    auto period_map = [&](const Eigen::VectorXd& x) {
        State st = unpack(x);
        for (int k = 0; k < params.steps_per_cycle; ++k) dyn.rk4_step(st, k * h, h, 0.0);
        return pack(st);
    };

    TrajectoryRecord rec;
    Eigen::VectorXd x = pack(s);
    Eigen::VectorXd residual = period_map(x) - x;
    const std::size_t dim = x.size();
    for (int it = 0; it < params.max_newton_iterations && residual.norm() > params.newton_tolerance;
         ++it) {
        Eigen::MatrixXd jac(dim, dim);
        const Eigen::VectorXd px = residual + x;
        for (std::size_t c = 0; c < dim; ++c) {
            const double dx = 1e-7 * std::max(1.0, std::abs(x[c]));
            Eigen::VectorXd xp = x;
            xp[c] += dx;
            jac.col(c) = (period_map(xp) - px) / dx;
        }
        jac -= Eigen::MatrixXd::Identity(dim, dim);
        // Near-continuous orbit families (rotations of a crystal in a spherical
        // trap) make J - I nearly singular; drop those directions.
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-7);
        x -= svd.solve(residual);
        residual = period_map(x) - x;
        check_finite(unpack(x), bound);
    }
    rec.periodicity_residual = residual.norm();
    s = unpack(x);

    // Record the steady orbit.
    rec.steps_per_cycle = params.steps_per_cycle;
    rec.n_cycles = params.record_cycles;
    rec.time_step = h;
    rec.static_field = params.static_field;
    const long samples = long(params.record_cycles) * params.steps_per_cycle;
    rec.positions.reserve(samples);
    rec.velocities.reserve(samples);
    rec.r0.assign(n, CVec3::Zero());
    rec.r2.assign(n, CVec3::Zero());
    rec.r4.assign(n, CVec3::Zero());
    rec.r6.assign(n, CVec3::Zero());
    double total_power = 0.0;
    for (long k = 0; k < samples; ++k) {
        const double t = k * h;
        rec.positions.push_back(s.r);
        rec.velocities.push_back(s.v);
        for (std::size_t i = 0; i < n; ++i) {
            const std::complex<double> ph2 = std::polar(1.0, -2.0 * t);
            const std::complex<double> ph4 = ph2 * ph2;
            rec.r0[i] += s.r[i].cast<std::complex<double>>();
            rec.r2[i] += ph2 * s.r[i].cast<std::complex<double>>();
            rec.r4[i] += ph4 * s.r[i].cast<std::complex<double>>();
            rec.r6[i] += ph4 * ph2 * s.r[i].cast<std::complex<double>>();
            total_power += s.r[i].squaredNorm();
        }
        dyn.rk4_step(s, t, h, 0.0);
        if (k % params.steps_per_cycle == 0) check_finite(s, bound);
    }
    const double inv = 1.0 / double(samples);
    double harmonic_power = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        rec.r0[i] *= inv;
        rec.r2[i] *= inv;
        rec.r4[i] *= inv;
        rec.r6[i] *= inv;
        // Real signal: the n and -n components have equal power.
        harmonic_power += rec.r0[i].squaredNorm() +
                          2.0 * (rec.r2[i].squaredNorm() + rec.r4[i].squaredNorm() +
                                 rec.r6[i].squaredNorm());
    }
    total_power *= inv;
    rec.harmonic_residual = total_power > 0.0 ? std::abs(total_power - harmonic_power) / total_power : 0.0;
    return rec;
}

IonCrystal symmetric_orientation(const IonCrystal& crystal)
{
    if (!crystal.trap.spherical(1e-9)) {
        throw PreconditionError("symmetric_orientation: only meaningful for the spherical trap");
    }
    IonCrystal c = crystal;
    if (c.size() < 2) return c;
    Mat3 second = Mat3::Zero();
    for (const auto& r : c.positions) second += r * r.transpose();
    const Eigen::SelfAdjointEigenSolver<Mat3> es(second);
    Mat3 axes = es.eigenvectors().rowwise().reverse();  // columns by descending extent
    if (axes.determinant() < 0.0) axes.col(2) *= -1.0;
    for (auto& r : c.positions) r = axes.transpose() * r;
    const double phi = std::atan2(c.positions[0].y(), c.positions[0].x());
    const Mat3 rz = Eigen::AngleAxisd(-phi, Vec3::UnitZ()).toRotationMatrix();
    for (auto& r : c.positions) r = rz * r;
    return c;
}

IonCrystal oracle_mean_crystal(const TrajectoryRecord& record, const IonCrystal& like)
{
    IonCrystal c = like;
    c.positions = record.real_part(record.r0);
    c.seed_family = SeedFamily::external;
    return c;
}

ShiftDistribution oracle_time_dilation(const TrajectoryRecord& record, const ClockSpecies& species,
                                       const TrapConfig& trap)
{
    const std::size_t n = record.n_ions();
    if (n == 0 || record.positions.empty()) throw DomainError("oracle_time_dilation: empty record");
    const RfDynamics dyn(trap, record.static_field);
    const double l = characteristic_length(species, trap.omega_z);
    const double v_unit = l * trap.Omega / 2.0;
    const double e_unit = species.mass * trap.omega_z * trap.omega_z * l / species.charge;
    const double c2 = constants::c * constants::c;
    const double stark = -species.delta_alpha_static / (2.0 * constants::h * species.clock_frequency);

    std::vector<double> v2(n, 0.0), e2(n, 0.0);
    const std::size_t samples = record.positions.size();
    for (std::size_t k = 0; k < samples; ++k) {
        const double t = double(k) * record.time_step;
        for (std::size_t i = 0; i < n; ++i) {
            v2[i] += record.velocities[k][i].squaredNorm();
            e2[i] += dyn.field(record.positions[k], i, t).squaredNorm();
        }
    }
    std::vector<double> shift(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double mean_v2 = v2[i] / double(samples) * v_unit * v_unit;
        const double mean_e2 = e2[i] / double(samples) * e_unit * e_unit;
        shift[i] = -mean_v2 / (2.0 * c2) + stark * mean_e2;
    }
    return ShiftDistribution::from_samples(std::move(shift), "oracle total (time dilation + Stark)");
}

}  // namespace ionclock
