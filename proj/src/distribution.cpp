#include "ionclock/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "ionclock/errors.hpp"

namespace ionclock {

namespace {

struct Moments {
    double mean = 0.0, std = 0.0;
};

Moments moments(std::span<const double> x)
{
    Moments m;
    if (x.empty()) return m;
    double sum = 0.0;
    for (double v : x) sum += v;
    m.mean = sum / double(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - m.mean) * (v - m.mean);
    m.std = std::sqrt(ss / double(x.size()));
    return m;
}

}  // namespace

Histogram make_histogram(std::span<const double> samples, std::size_t bins, double sigmas)
{
    if (bins == 0) throw DomainError("make_histogram: need at least one bin");
    const Moments m = moments(samples);
    double half = sigmas * m.std;
    if (!(half > 0.0)) half = std::max(1.0, std::abs(m.mean));
    const double lo = m.mean - half;
    const double width = 2.0 * half / double(bins);

    Histogram h;
    h.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = lo + width * double(b);
    h.counts.assign(bins, 0);
    for (double v : samples) {
        const double pos = (v - lo) / width;
        if (pos < 0.0) {
            ++h.underflow;
        } else if (pos >= double(bins)) {
            ++h.overflow;
        } else {
            ++h.counts[static_cast<std::size_t>(pos)];
        }
    }
    return h;
}

ShiftDistribution ShiftDistribution::from_samples(std::vector<double> samples, std::string label,
                                                  std::string unit, std::size_t bins)
{
    ShiftDistribution d;
    const Moments m = moments(samples);
    d.mean = m.mean;
    d.std = m.std;
    if (!samples.empty()) {
        const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
        d.min = *lo;
        d.max = *hi;
    }
    d.histogram = make_histogram(samples, bins);
    d.per_ion = std::move(samples);
    d.label = std::move(label);
    d.unit = std::move(unit);
    return d;
}

double ShiftDistribution::fraction_below(double threshold) const
{
    if (per_ion.empty()) return 0.0;
    const auto n = std::count_if(per_ion.begin(), per_ion.end(),
                                 [threshold](double v) { return std::abs(v) < threshold; });
    return double(n) / double(per_ion.size());
}

ShiftDistribution combine(const ShiftDistribution& a, const ShiftDistribution& b,
                          std::string label)
{
    if (a.size() != b.size()) throw DomainError("combine: distributions differ in ion count");
    if (a.unit != b.unit) throw DomainError("combine: distributions differ in unit");
    std::vector<double> sum(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) sum[i] = a.per_ion[i] + b.per_ion[i];
    return ShiftDistribution::from_samples(std::move(sum), std::move(label), a.unit,
                                           a.histogram.counts.size());
}

ShiftDistribution rescaled(const ShiftDistribution& d, double factor, std::string unit)
{
    std::vector<double> v = d.per_ion;
    for (double& x : v) x *= factor;
    return ShiftDistribution::from_samples(std::move(v), d.label, std::move(unit),
                                           d.histogram.counts.size());
}

void write_histogram(std::ostream& os, const Histogram& h)
{
    os << std::setprecision(10);
    for (std::size_t b = 0; b < h.counts.size(); ++b) os << h.center(b) << ' ' << h.counts[b] << '\n';
}

}  // namespace ionclock
