#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>
#include <doctest.h>

#include "ionclock/distribution.hpp"
#include "ionclock/errors.hpp"
#include "ionclock/metrics.hpp"
#include "support.hpp"

using namespace ionclock;
using doctest::Approx;

TEST_CASE("distribution statistics")
{
    const auto d = ShiftDistribution::from_samples({1.0, 2.0, 3.0, 4.0}, "x", "Hz");
    CHECK(d.mean == 2.5);
    CHECK(d.std == Approx(std::sqrt(1.25)));
    CHECK(d.min == 1.0);
    CHECK(d.max == 4.0);
    CHECK(d.unit == "Hz");
    std::size_t total = d.histogram.underflow + d.histogram.overflow;
    for (auto c : d.histogram.counts) total += c;
    CHECK(total == 4);
    CHECK(d.fraction_below(2.5) == 0.5);

    const auto constant = ShiftDistribution::from_samples({3.0, 3.0}, "c");
    CHECK(constant.std == 0.0);
    CHECK(constant.histogram.counts.size() == default_histogram_bins);

    const auto r = rescaled(d, 2.0, "fractional");
    CHECK(r.mean == 5.0);
    CHECK(r.std == Approx(2.0 * d.std));
    CHECK(r.unit == "fractional");

    const auto sum = combine(d, d, "2x");
    CHECK(sum.per_ion[3] == 8.0);
    CHECK_THROWS(combine(d, r, "mixed"));
    CHECK_THROWS(combine(d, ShiftDistribution::from_samples({1.0}, "y", "Hz"), "short"));
}

TEST_CASE("Ramsey contrast")
{
    const std::vector<double> same(100, 0.37);
    const auto r = ramsey_contrast(same, 1.0);
    CHECK(r.contrast == Approx(1.0).epsilon(1e-15));
    CHECK(r.center_shift == Approx(0.37).epsilon(1e-12));

    // Gaussian detunings sampled at their quantiles: |<e^{i phi}>| = exp(-2 pi^2 s^2 T^2).
    const int n = 100000;
    const double sigma = 0.1;
    std::vector<double> g(n);
    for (int k = 0; k < n; ++k) {
        g[k] = sigma * std::sqrt(2.0) * boost::math::erf_inv(2.0 * (k + 0.5) / n - 1.0);
    }
    const double expected = std::exp(-2.0 * std::numbers::pi * std::numbers::pi * sigma * sigma);
    CHECK(expected == Approx(0.821).epsilon(1e-3));
    CHECK(ramsey_contrast(g, 1.0).contrast == Approx(expected).epsilon(1e-4));

    // Two ions half a cycle apart cancel.
    CHECK(ramsey_contrast(std::vector<double>{0.0, 0.5}, 1.0).contrast < 1e-15);
    CHECK_THROWS_AS(ramsey_contrast(std::vector<double>{}, 1.0), DomainError);
    CHECK_THROWS_AS(ramsey_contrast(same, 0.0), DomainError);
}

TEST_CASE("projection-noise stability")
{
    const double nu = lu176_species().clock_frequency;
    const double s = projection_noise_stability(nu, 1000, 1.0, 1.0);
    CHECK(s == Approx(1.0 / (2.0 * std::numbers::pi * nu * std::sqrt(1000.0))));
    CHECK(projection_noise_stability(nu, 1000, 1.0, 4.0) == Approx(0.5 * s));
    CHECK(projection_noise_stability(nu, 4000, 1.0, 1.0) == Approx(0.5 * s));
    const double tau = averaging_time_to_target(nu, 1000, 1.0, 1e-18);
    CHECK(projection_noise_stability(nu, 1000, 1.0, tau) == Approx(1e-18).epsilon(1e-12));
    CHECK_THROWS_AS(projection_noise_stability(nu, 0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(averaging_time_to_target(nu, 1000, 1.0, 0.0), DomainError);
}

TEST_CASE("environmental shifts")
{
    const auto s = lu176_species();
    const double b300 = bbr_shift(s, 300.0);
    CHECK(b300 > 0.0);  // negative differential polarisability
    CHECK(bbr_shift(s, 600.0) == Approx(16.0 * b300));
    CHECK(bbr_shift(s, 301.0) == Approx(std::pow(301.0 / 300.0, 4) * b300).epsilon(1e-14));
    CHECK(bbr_shift(s, 0.0) == 0.0);
    CHECK_THROWS_AS(bbr_shift(s, -1.0), DomainError);

    const double z = quadratic_zeeman_shift(s, 10e-6);
    CHECK(z < 0.0);
    CHECK(quadratic_zeeman_shift(s, 20e-6) == Approx(4.0 * z));

    const double d = secular_doppler_shift(s);
    CHECK(d < 0.0);
    CHECK(secular_doppler_shift(s, 6) == Approx(2.0 * d));
    // hbar Gamma / 4 per mode over m c^2.
    const double expected = -3.0 * constants::hbar * s.cooling_linewidth / (4.0 * s.mass * constants::c * constants::c);
    CHECK(d == Approx(expected));
}

TEST_CASE("budget rows")
{
    const auto s = lu176_species();
    const auto& c = testing::cached_crystal(1000);
    const auto t = testing::standard_trap();
    Environment env;
    const auto rows = shift_budget(s, t, c, env);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].effect == "Blackbody radiation");
    CHECK(rows[1].effect == "Secular Doppler");
    CHECK(rows[2].effect == "Micromotion");
    CHECK(rows[3].effect == "Quadrupole");
    CHECK(rows[4].effect == "Quadratic Zeeman");
    CHECK(rows[5].bound.has_value());
    CHECK(rows[2].distribution.has_value());
    CHECK(rows[3].distribution.has_value());
    CHECK(rows[0].fractional_shift == bbr_shift(s, 300.0));
    // The hyperfine factors sum to zero, so the averaged quadrupole row vanishes.
    CHECK(std::abs(rows[3].fractional_shift) < 1e-22);

    env.temperature = 301.0;
    env.magnetic_field = 20e-6;
    const auto warm = shift_budget(s, t, c, env);
    CHECK(warm[0].fractional_shift == Approx(std::pow(301.0 / 300.0, 4) * rows[0].fractional_shift));
    CHECK(warm[4].fractional_shift == Approx(4.0 * rows[4].fractional_shift));
    CHECK(warm[2].fractional_shift == rows[2].fractional_shift);
}
