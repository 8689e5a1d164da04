#include "honesty/stats.hpp"

#include "honesty/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace honesty::stats {

double mean(std::span<const double> xs) {
    if (xs.empty()) throw InsufficientData("mean of an empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
    if (xs.size() < 2) throw InsufficientData("variance needs at least two values");
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size() - 1);
}

double quantile(std::span<const double> xs, double p) {
    if (xs.empty()) throw InsufficientData("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw DataError("quantile probability outside [0, 1]");
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace {

double signed_infinity(double x) {
    return std::copysign(std::numeric_limits<double>::infinity(), x);
}

}  // namespace

TTestResult t_test(std::span<const double> a, std::span<const double> b, TTestMode mode) {
    TTestResult out;
    double se = 0.0, sd_effect = 0.0;
    if (mode == TTestMode::Paired) {
        if (a.size() != b.size()) throw DataError("paired t-test needs samples of equal length");
        if (a.size() < 2) throw InsufficientData("paired t-test needs at least two pairs");
        std::vector<double> d(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
        out.mean_difference = mean(d);
        sd_effect = std::sqrt(variance(d));
        se = sd_effect / std::sqrt(static_cast<double>(d.size()));
        out.df = static_cast<double>(d.size() - 1);
    } else {
        if (a.size() < 2 || b.size() < 2) throw InsufficientData("t-test needs at least two values per sample");
        const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
        const double va = variance(a), vb = variance(b);
        out.mean_difference = mean(a) - mean(b);
        sd_effect = std::sqrt(((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0));
        if (mode == TTestMode::Pooled) {
            se = sd_effect * std::sqrt(1.0 / na + 1.0 / nb);
            out.df = na + nb - 2.0;
        } else {
            const double qa = va / na, qb = vb / nb;
            se = std::sqrt(qa + qb);
            out.df = qa + qb > 0.0 ? (qa + qb) * (qa + qb) / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0))
                                   : na + nb - 2.0;
        }
    }

    if (se > 0.0) {
        out.t = out.mean_difference / se;
        out.p = t_two_sided_p(out.t, out.df);
        out.cohens_d = out.mean_difference / sd_effect;
    } else {
        out.degenerate = true;
        if (out.mean_difference == 0.0) {
            out.t = 0.0;
            out.p = 1.0;
            out.cohens_d = 0.0;
        } else {
            out.t = signed_infinity(out.mean_difference);
            out.p = 0.0;
            out.cohens_d = signed_infinity(out.mean_difference);
        }
    }
    return out;
}

Correlation pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("correlation needs samples of equal length");
    if (x.size() < 3) throw InsufficientData("correlation needs at least three pairs");
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw DataError("correlation is undefined for a constant sample");
    Correlation out;
    out.n = x.size();
    out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double df = static_cast<double>(out.n - 2);
    const double denom = 1.0 - out.r * out.r;
    const double t = denom > 0.0 ? out.r * std::sqrt(df / denom) : signed_infinity(out.r);
    out.p = t_two_sided_p(t, df);
    return out;
}

}  // namespace honesty::stats
