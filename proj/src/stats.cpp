#include "treedyn/stats.hpp"

#include <algorithm>
#include <cmath>

#include "treedyn/errors.hpp"

namespace treedyn::stats {

Interval wilson_interval(long successes, long trials, double z) {
    if (trials <= 0) throw contract_violation("wilson_interval: trials must be positive");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return Interval{center - half, center + half};
}

double mean(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw contract_violation("fit_line: need matching arrays of length >= 2");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

double binomial_upper_pvalue(long n, double p, long observed) {
    if (observed <= 0) return 1.0;
    if (observed > n) return 0.0;
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    double total = 0.0;
    // Sum pmf from `observed` upward until terms become negligible.
    for (long k = observed; k <= n; ++k) {
        double lpmf = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                      std::lgamma(n - k + 1.0) + k * lp + (n - k) * lq;
        double term = std::exp(lpmf);
        total += term;
        if (term < 1e-18 * (total + 1e-300) && k > n * p) break;
    }
    return std::min(total, 1.0);
}

double ks_statistic(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double u = samples[i];
        d = std::max(d, (static_cast<double>(i) + 1.0) / n - u);
        d = std::max(d, u - static_cast<double>(i) / n);
    }
    return d;
}

double chi_square_poisson(const std::vector<long>& counts, double lambda, int max_bin) {
    std::vector<double> observed(static_cast<std::size_t>(max_bin) + 1, 0.0);
    for (long c : counts) {
        int b = c >= max_bin ? max_bin : static_cast<int>(c);
        observed[static_cast<std::size_t>(b)] += 1.0;
    }
    const double n = static_cast<double>(counts.size());
    double stat = 0.0;
    double tail = 1.0;
    double pmf = std::exp(-lambda);
    for (int b = 0; b < max_bin; ++b) {
        tail -= pmf;
        const double expected = n * pmf;
        const double diff = observed[static_cast<std::size_t>(b)] - expected;
        stat += diff * diff / expected;
        pmf *= lambda / static_cast<double>(b + 1);
    }
    const double expected_tail = n * tail;
    const double diff = observed[static_cast<std::size_t>(max_bin)] - expected_tail;
    stat += diff * diff / expected_tail;
    return stat;
}

} // namespace treedyn::stats
