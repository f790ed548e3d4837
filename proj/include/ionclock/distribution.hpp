#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ionclock {

struct Histogram {
    std::vector<double> edges;          // bins + 1 entries
    std::vector<std::size_t> counts;    // bins entries
    std::size_t underflow = 0;
    std::size_t overflow = 0;

    double center(std::size_t bin) const { return 0.5 * (edges[bin] + edges[bin + 1]); }
};

inline constexpr std::size_t default_histogram_bins = 50;
inline constexpr double default_histogram_sigmas = 4.0;

/// Uniform bins over mean +- sigmas * std (or +-1 around a constant sample).
Histogram make_histogram(std::span<const double> samples, std::size_t bins = default_histogram_bins,
                         double sigmas = default_histogram_sigmas);

/*!
Per-ion values of one shift mechanism plus summary statistics. `std` is the
population standard deviation. `unit` is "fractional" or "Hz".
*/
struct ShiftDistribution {
    std::vector<double> per_ion;
    double mean = 0.0;
    double std = 0.0;
    double min = 0.0;
    double max = 0.0;
    Histogram histogram;
    std::string label;
    std::string unit = "fractional";

    std::size_t size() const { return per_ion.size(); }

    static ShiftDistribution from_samples(std::vector<double> samples, std::string label,
                                          std::string unit = "fractional",
                                          std::size_t bins = default_histogram_bins);

    /// Fraction of samples with |value| < threshold.
    double fraction_below(double threshold) const;
};

/// Element-wise sum of two distributions over the same ions.
ShiftDistribution combine(const ShiftDistribution& a, const ShiftDistribution& b,
                          std::string label);

/// Every value multiplied by `factor`, e.g. fractional -> Hz with factor = nu.
ShiftDistribution rescaled(const ShiftDistribution& d, double factor, std::string unit);

/// Two columns: bin centre, count.
void write_histogram(std::ostream& os, const Histogram& h);

}  // namespace ionclock
