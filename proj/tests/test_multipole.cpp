#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "ionclock/errors.hpp"
#include "ionclock/multipole.hpp"
#include "support.hpp"

using namespace ionclock;
using doctest::Approx;

namespace {

Mat3 random_traceless(std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    Mat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = g(rng);
    m = (0.5 * (m + m.transpose())).eval();
    return m - m.trace() / 3.0 * Mat3::Identity();
}

Vec3 direction(const FieldOrientation& o)
{
    return Vec3(std::sin(o.beta) * std::cos(o.alpha), std::sin(o.beta) * std::sin(o.alpha),
                std::cos(o.beta));
}

}  // namespace

TEST_CASE("geometric factor is half the projection of a traceless tensor")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        QuadrupoleTensor q;
        q.q_matrix = random_traceless(rng);
        const FieldOrientation o{2.0 * std::numbers::pi * u(rng), std::numbers::pi * u(rng)};
        const Vec3 n = direction(o);
        CHECK(quadrupole_geometric_factor(q, o) == Approx(0.5 * n.dot(q.q_matrix * n)).epsilon(1e-12));
    }
    QuadrupoleTensor axial;
    axial.q_matrix = Vec3(-1.0, -1.0, 2.0).asDiagonal();
    CHECK(quadrupole_geometric_factor(axial, {0.0, 0.0}) == Approx(1.0));
    // Magic angle.
    CHECK(quadrupole_geometric_factor(axial, {0.3, std::acos(1.0 / std::sqrt(3.0))}) ==
          Approx(0.0).epsilon(1e-15));
}

TEST_CASE("orientation sweep")
{
    CHECK_THROWS_AS(orientation_sweep(0), DomainError);
    const auto one = orientation_sweep(1);
    CHECK(one[0].beta == Approx(std::acos(0.5)));
    const auto sweep = orientation_sweep(20000);
    Vec3 mean_n = Vec3::Zero();
    for (const auto& o : sweep) {
        CHECK(o.beta >= 0.0);
        CHECK(o.beta <= std::numbers::pi / 2.0);
        mean_n += direction(o);
    }
    // Hemisphere centroid at z = 1/2.
    CHECK((mean_n / double(sweep.size()) - Vec3(0, 0, 0.5)).norm() < 1e-3);

    // The average over directions of a traceless projection vanishes.
    std::mt19937_64 rng(8);
    QuadrupoleTensor q;
    q.q_matrix = random_traceless(rng);
    double avg = 0.0;
    for (const auto& o : sweep) avg += quadrupole_geometric_factor(q, o);
    CHECK(std::abs(avg / double(sweep.size())) < 1e-3 * q.q_matrix.norm());
}

TEST_CASE("crystal tensors are symmetric and traceless")
{
    const auto& c = testing::cached_crystal(1000);
    const auto all = quadrupole_tensors(c);
    REQUIRE(all.size() == c.size());
    for (std::size_t i : {std::size_t(0), std::size_t(17), std::size_t(999)}) {
        const auto single = quadrupole_tensor(c, i);
        CHECK((single.q_matrix - all[i].q_matrix).norm() < 1e-12 * single.q_matrix.norm());
        CHECK(all[i].ion_index == i);
    }
    for (const auto& q : all) {
        CHECK(std::abs(q.q_matrix.trace()) < 1e-11);
        CHECK((q.q_matrix - q.q_matrix.transpose()).norm() <= 1e-14 * q.q_matrix.norm());
    }
}

TEST_CASE("two-ion tensor")
{
    IonCrystal c;
    c.positions = {Vec3(0, 0, 1), Vec3(0, 0, -1)};
    c.trap = testing::standard_trap();
    const auto q = quadrupole_tensor(c, 0);
    // -(3 zz - r^2 I) / r^5 at r = 2.
    CHECK(q.q_matrix(2, 2) == Approx(-2.0 * 4.0 / 32.0));
    CHECK(q.q_matrix(0, 0) == Approx(4.0 / 32.0));

    IonCrystal one;
    one.positions = {Vec3(1, 2, 3)};
    one.trap = c.trap;
    const auto d = quadrupole_shift_distribution(one, lu176_species(), one.trap, {});
    CHECK(d.per_ion[0] == 0.0);
}

TEST_CASE("quadrupole scale")
{
    const auto s = lu176_species();
    const double scale = quadrupole_scale_hz(s, testing::standard_trap());
    CHECK(scale == Approx(-2.53).epsilon(5e-3));
    TrapConfig t = testing::standard_trap();
    t.omega_z *= 2.0;
    CHECK(quadrupole_scale_hz(s, t) == Approx(4.0 * scale));
}

TEST_CASE("hyperfine averaging")
{
    const auto s = lu176_species();
    CHECK(std::abs(hyperfine_average(s.hyperfine_factors, 0.37)) < 1e-16);
    const std::vector<std::pair<double, double>> levels{{1.0, 2.0}, {-0.5, 4.0}};
    CHECK(hyperfine_average(levels) == Approx(0.0));
    CHECK_THROWS_AS(hyperfine_average(std::vector<double>{}, 1.0), DomainError);
}

TEST_CASE("doughnut profile")
{
    BeamProfile b;
    b.waist = 50e-6;
    b.power = 0.3;
    CHECK(lg_doughnut_intensity(0.0, b) == 0.0);
    // Peak at rho = w / sqrt 2.
    const double peak = b.waist / std::sqrt(2.0);
    const double ip = lg_doughnut_intensity(peak, b);
    CHECK(ip == Approx(2.0 * b.power / (std::numbers::pi * b.waist * b.waist * std::exp(1.0))));
    CHECK(lg_doughnut_intensity(0.99 * peak, b) < ip);
    CHECK(lg_doughnut_intensity(1.01 * peak, b) < ip);
    // Radial integral carries the full power.
    double total = 0.0;
    const double dr = b.waist / 2000.0;
    for (int k = 0; k < 20000; ++k) {
        const double r = (k + 0.5) * dr;
        total += 2.0 * std::numbers::pi * r * lg_doughnut_intensity(r, b) * dr;
    }
    CHECK(total == Approx(b.power).epsilon(1e-6));
    CHECK_THROWS_AS(lg_doughnut_intensity(-1.0, b), DomainError);
    b.waist = 0.0;
    CHECK_THROWS_AS(lg_doughnut_intensity(1.0, b), DomainError);
}

TEST_CASE("RF field averages")
{
    const auto s = lu176_species();
    const auto t = testing::standard_trap();
    IonCrystal c;
    c.positions = {Vec3(1, 0, 0)};
    c.trap = t;
    const auto f = rf_quadratic_field_average(c, s, t);
    const double l = characteristic_length(s, t.omega_z);
    const double amp = s.mass * t.omega_z * t.Omega * l / s.charge * std::sqrt(3.0);
    CHECK(f.total[0] == Approx(0.5 * amp * amp));
    CHECK(f.anisotropic[0] == Approx(-0.5 * amp * amp));
    const auto fx = rf_quadratic_field_average(c, s, t, Vec3(2, 0, 0));
    CHECK(fx.anisotropic[0] == Approx(amp * amp));
    CHECK_THROWS_AS(rf_quadratic_field_average(c, s, t, Vec3::Zero()), DomainError);
}

TEST_CASE("tensor compensation")
{
    const auto s = lu176_species();
    const auto& c = testing::cached_crystal(1000);
    const auto t = testing::standard_trap();
    const auto beam0 = compensation_beam(s, 100.0 * characteristic_length(s, t.omega_z));
    CHECK(beam0.power == 0.0);
    CHECK(beam0.alpha2 * s.alpha2_dc < 0.0);

    const auto raw = tensor_shift_distribution(c, s, t);
    const auto zero = compensated_tensor_distribution(c, s, t, beam0);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(zero.per_ion[i] == raw.per_ion[i]);

    const auto best = optimize_compensation_power(c, s, t, beam0);
    CHECK(best.power > 0.0);
    const auto comp = compensated_tensor_distribution(c, s, t, best);
    CHECK(comp.std < raw.std);
    for (double f : {0.9, 1.1}) {
        auto b = best;
        b.power *= f;
        CHECK(compensated_tensor_distribution(c, s, t, b).std > comp.std);
    }
    const auto capped = optimize_compensation_power(c, s, t, beam0, 0.1 * best.power);
    CHECK(capped.power == Approx(0.1 * best.power));

    auto wrong = beam0;
    wrong.alpha2 = -wrong.alpha2;
    CHECK_THROWS_AS(compensated_tensor_distribution(c, s, t, wrong), SignError);
    CHECK_THROWS_AS(optimize_compensation_power(c, s, t, wrong), SignError);
}
