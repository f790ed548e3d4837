#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "force_kernel.hpp"
#include "ionclock/crystal.hpp"
#include "ionclock/errors.hpp"

namespace ionclock {

namespace {
int g_threads = 0;
}

void set_thread_count(int n)
{
    g_threads = n < 0 ? 0 : n;
}

int thread_count()
{
#ifdef _OPENMP
    return g_threads > 0 ? g_threads : omp_get_max_threads();
#else
    return 1;
#endif
}

namespace detail {

void ForceKernel::load(std::span<const Vec3> positions)
{
    const std::size_t n = positions.size();
    x.resize(n);
    y.resize(n);
    z.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = positions[i][0];
        y[i] = positions[i][1];
        z[i] = positions[i][2];
    }
}

// Both variants accumulate in a fixed order, so results do not depend on
// scheduling. The single-threaded path uses Newton's third law and differs
// from the row-parallel one only by rounding (~1e-15 relative).
double ForceKernel::coulomb(std::vector<Vec3>& forces) const
{
    const long n = static_cast<long>(x.size());
    const double* px = x.data();
    const double* py = y.data();
    const double* pz = z.data();
    double energy = 0.0;
    double r2min = std::numeric_limits<double>::infinity();
    const int threads = thread_count();

    if (threads <= 1) {
        std::vector<double> fx(n, 0.0), fy(n, 0.0), fz(n, 0.0);
        double* gx = fx.data();
        double* gy = fy.data();
        double* gz = fz.data();
        for (long i = 0; i < n; ++i) {
            const double xi = px[i], yi = py[i], zi = pz[i];
            double ax = 0.0, ay = 0.0, az = 0.0, e = 0.0, m = r2min;
#pragma omp simd reduction(+ : ax, ay, az, e) reduction(min : m)
            for (long j = i + 1; j < n; ++j) {
                const double dx = xi - px[j], dy = yi - py[j], dz = zi - pz[j];
                const double r2 = dx * dx + dy * dy + dz * dz;
                m = std::min(m, r2);
                const double inv = 1.0 / std::sqrt(r2);
                const double inv3 = inv * inv * inv;
                ax += dx * inv3;
                ay += dy * inv3;
                az += dz * inv3;
                gx[j] -= dx * inv3;
                gy[j] -= dy * inv3;
                gz[j] -= dz * inv3;
                e += inv;
            }
            gx[i] += ax;
            gy[i] += ay;
            gz[i] += az;
            energy += e;
            r2min = m;
        }
        forces.resize(n);
        for (long i = 0; i < n; ++i) forces[i] = Vec3(gx[i], gy[i], gz[i]);
    } else {
        forces.assign(n, Vec3::Zero());
#pragma omp parallel for schedule(static) reduction(+ : energy) reduction(min : r2min) \
    num_threads(threads)
        for (long i = 0; i < n; ++i) {
            const double xi = px[i], yi = py[i], zi = pz[i];
            double ax = 0.0, ay = 0.0, az = 0.0, e = 0.0, m = r2min;
            auto row = [&](long lo, long hi) {
#pragma omp simd reduction(+ : ax, ay, az, e) reduction(min : m)
                for (long j = lo; j < hi; ++j) {
                    const double dx = xi - px[j], dy = yi - py[j], dz = zi - pz[j];
                    const double r2 = dx * dx + dy * dy + dz * dz;
                    m = std::min(m, r2);
                    const double inv = 1.0 / std::sqrt(r2);
                    const double inv3 = inv * inv * inv;
                    ax += dx * inv3;
                    ay += dy * inv3;
                    az += dz * inv3;
                    e += inv;
                }
            };
            row(0, i);
            row(i + 1, n);
            forces[i] = Vec3(ax, ay, az);
            energy += 0.5 * e;
            r2min = std::min(r2min, m);
        }
    }
    if (r2min < coincidence_r2) throw SingularityError("coincident ions in Coulomb sum");
    return energy;
}

}  // namespace detail

std::vector<Vec3> scaled_force(std::span<const Vec3> positions, const LambdaMatrices& lambdas)
{
    detail::ForceKernel kernel;
    kernel.load(positions);
    std::vector<Vec3> forces;
    kernel.coulomb(forces);
    const Mat3 k = lambdas.curvature();
    for (std::size_t i = 0; i < positions.size(); ++i) forces[i] -= k * positions[i];
    return forces;
}

double potential_energy(std::span<const Vec3> positions, const LambdaMatrices& lambdas)
{
    detail::ForceKernel kernel;
    kernel.load(positions);
    std::vector<Vec3> forces;
    double e = kernel.coulomb(forces);
    const Mat3 k = lambdas.curvature();
    for (const auto& r : positions) e += 0.5 * r.dot(k * r);
    return e;
}

double max_force_norm(std::span<const Vec3> forces)
{
    double m = 0.0;
    for (const auto& f : forces) m = std::max(m, f.squaredNorm());
    return std::sqrt(m);
}

}  // namespace ionclock
