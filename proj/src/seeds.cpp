#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "ionclock/crystal.hpp"
#include "ionclock/errors.hpp"

namespace ionclock {

namespace {

struct Icosahedron {
    std::array<Vec3, 12> vertices;
    std::vector<std::array<int, 2>> edges;
    std::vector<std::array<int, 3>> faces;
};

// Unit edge length, one vertex pair on the z axis.
Icosahedron unit_icosahedron()
{
    constexpr double phi = std::numbers::phi;
    Icosahedron ico;
    int k = 0;
    for (double s1 : {1.0, -1.0}) {
        for (double s2 : {1.0, -1.0}) {
            ico.vertices[k++] = Vec3(0.0, s1, s2 * phi);
            ico.vertices[k++] = Vec3(s1, s2 * phi, 0.0);
            ico.vertices[k++] = Vec3(s2 * phi, 0.0, s1);
        }
    }
    for (auto& v : ico.vertices) v *= 0.5;  // edge 2 -> 1

    auto adjacent = [&](int i, int j) {
        return std::abs((ico.vertices[i] - ico.vertices[j]).norm() - 1.0) < 1e-9;
    };
    for (int i = 0; i < 12; ++i) {
        for (int j = i + 1; j < 12; ++j) {
            if (!adjacent(i, j)) continue;
            ico.edges.push_back({i, j});
            for (int m = j + 1; m < 12; ++m) {
                if (adjacent(i, m) && adjacent(j, m)) ico.faces.push_back({i, j, m});
            }
        }
    }
    return ico;
}

void append_shell(std::vector<Vec3>& out, const Icosahedron& ico, int k, double spacing)
{
    const double s = spacing * k;
    for (const auto& v : ico.vertices) out.push_back(s * v);
    for (const auto& [i, j] : ico.edges) {
        for (int t = 1; t < k; ++t) {
            const double w = double(t) / k;
            out.push_back(s * ((1.0 - w) * ico.vertices[i] + w * ico.vertices[j]));
        }
    }
    for (const auto& [i, j, m] : ico.faces) {
        for (int p = 1; p < k; ++p) {
            for (int q = 1; p + q < k; ++q) {
                const double wp = double(p) / k, wq = double(q) / k;
                out.push_back(s * ((1.0 - wp - wq) * ico.vertices[i] + wp * ico.vertices[j] +
                                   wq * ico.vertices[m]));
            }
        }
    }
}

}  // namespace

std::vector<Vec3> mackay_icosahedron_seed(std::size_t n)
{
    if (n == 0) throw DomainError("mackay_icosahedron_seed: n must be at least 1");
    static const Icosahedron ico = unit_icosahedron();
    std::vector<Vec3> sites{Vec3::Zero()};
    for (int k = 1; sites.size() < n; ++k) append_shell(sites, ico, k, mackay_spacing);
    sites.resize(n);
    return sites;
}

double default_bcc_lattice_constant()
{
    return std::cbrt(8.0 * std::numbers::pi / 3.0);
}

std::vector<Vec3> bcc_seed(std::size_t n, double lattice_constant)
{
    if (n == 0) throw DomainError("bcc_seed: n must be at least 1");
    if (!(lattice_constant > 0.0)) throw DomainError("bcc_seed: lattice constant must be positive");

    // Integer coordinates in units of half a cube edge: body centres have all
    // even components (origin included), corners all odd.
    struct Site {
        long r2;
        std::array<long, 3> p;
    };
    const long half_cells = static_cast<long>(std::ceil(std::cbrt(double(n) / 2.0))) + 2;
    std::vector<Site> sites;
    for (long x = -2 * half_cells; x <= 2 * half_cells; ++x) {
        for (long y = -2 * half_cells; y <= 2 * half_cells; ++y) {
            for (long z = -2 * half_cells; z <= 2 * half_cells; ++z) {
                const bool even = (x % 2 == 0) && (y % 2 == 0) && (z % 2 == 0);
                const bool odd = (x % 2 != 0) && (y % 2 != 0) && (z % 2 != 0);
                if (even || odd) sites.push_back({x * x + y * y + z * z, {x, y, z}});
            }
        }
    }
    std::stable_sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) {
        if (a.r2 != b.r2) return a.r2 < b.r2;
        return a.p < b.p;
    });
    const double h = 0.5 * lattice_constant;
    std::vector<Vec3> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = sites[i].p;
        out.emplace_back(h * p[0], h * p[1], h * p[2]);
    }
    return out;
}

double min_pair_distance(std::span<const Vec3> positions)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            best = std::min(best, (positions[i] - positions[j]).squaredNorm());
        }
    }
    return std::sqrt(best);
}

std::vector<Vec3> apply_jitter(std::span<const Vec3> positions, double fraction,
                               std::uint64_t seed)
{
    if (fraction < 0.0) throw DomainError("apply_jitter: fraction must be non-negative");
    std::vector<Vec3> out(positions.begin(), positions.end());
    if (fraction == 0.0 || positions.size() < 2) return out;

    const double amplitude = fraction * min_pair_distance(positions);
    // Explicit 53-bit mapping instead of std::uniform_real_distribution, whose
    // algorithm differs between standard libraries.
    std::mt19937_64 rng(seed);
    auto uniform = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };
    for (auto& p : out) {
        for (int d = 0; d < 3; ++d) p[d] += amplitude * (2.0 * uniform() - 1.0);
    }
    return out;
}

}  // namespace ionclock
