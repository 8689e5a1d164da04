// Brute-force reference implementations used to check the library.
#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<long double>>;

// Inverse by Gauss-Jordan elimination with partial pivoting.
inline Matrix invert(Matrix a) {
    const std::size_t n = a.size();
    Matrix inv(n, std::vector<long double>(n, 0.0L));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0L;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[p][c])) p = r;
        std::swap(a[c], a[p]);
        std::swap(inv[c], inv[p]);
        const long double d = a[c][c];
        for (std::size_t j = 0; j < n; ++j) {
            a[c][j] /= d;
            inv[c][j] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const long double f = a[r][c];
            if (f == 0.0L) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a[r][j] -= f * a[c][j];
                inv[r][j] -= f * inv[c][j];
            }
        }
    }
    return inv;
}

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
inline long double betacf(long double a, long double b, long double x) {
    const long double tiny = 1e-300L;
    long double qab = a + b, qap = a + 1.0L, qam = a - 1.0L;
    long double c = 1.0L, d = 1.0L - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0L / d;
    long double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const long double m2 = 2.0L * m;
        long double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0L + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0L + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0L / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0L + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0L + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0L / d;
        const long double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0L) < 1e-19L) break;
    }
    return h;
}

inline long double incomplete_beta(long double a, long double b, long double x) {
    if (x <= 0.0L) return 0.0L;
    if (x >= 1.0L) return 1.0L;
    const long double lbeta = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    const long double front = std::exp(lbeta + a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0L) / (a + b + 2.0L)) return front * betacf(a, b, x) / a;
    return 1.0L - front * betacf(b, a, 1.0L - x) / b;
}

// Two-sided Student t p-value.
inline long double t_p_value(long double t, long double df) {
    return incomplete_beta(df / 2.0L, 0.5L, df / (df + t * t));
}

struct Ols {
    std::vector<long double> beta, se, t, p;
    long double ssr = 0.0L;
};

// (X'X)^-1 X'y with SEs from SSR / (n - k).
inline Ols normal_equations(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
    const std::size_t n = x.size(), k = x.front().size();
    Matrix xtx(k, std::vector<long double>(k, 0.0L));
    std::vector<long double> xty(k, 0.0L);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < k; ++a) {
            xty[a] += static_cast<long double>(x[i][a]) * y[i];
            for (std::size_t b = 0; b < k; ++b) xtx[a][b] += static_cast<long double>(x[i][a]) * x[i][b];
        }
    }
    const auto inv = invert(xtx);
    Ols out;
    out.beta.assign(k, 0.0L);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) out.beta[a] += inv[a][b] * xty[b];
    for (std::size_t i = 0; i < n; ++i) {
        long double fit = 0.0L;
        for (std::size_t a = 0; a < k; ++a) fit += x[i][a] * out.beta[a];
        out.ssr += (y[i] - fit) * (y[i] - fit);
    }
    const long double df = static_cast<long double>(n - k);
    const long double s2 = out.ssr / df;
    for (std::size_t a = 0; a < k; ++a) {
        out.se.push_back(std::sqrt(s2 * inv[a][a]));
        out.t.push_back(out.beta[a] / out.se.back());
        out.p.push_back(t_p_value(out.t.back(), df));
    }
    return out;
}

// Mann-Whitney by counting every positive/negative pair.
inline double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double wins = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            pairs += 1.0;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / pairs;
}

// Binary nominal alpha from the 2x2 coincidence matrix.
inline double binary_alpha(const std::vector<int>& a, const std::vector<int>& b) {
    double disagree = 0.0, ones = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) disagree += 2.0;
        ones += a[i] + b[i];
    }
    const double n = 2.0 * static_cast<double>(a.size());
    const double zeros = n - ones;
    return 1.0 - (n - 1.0) * disagree / (2.0 * ones * zeros);
}

inline double phi(double z) { return 0.5 * (1.0 + std::erf(z / std::sqrt(2.0))); }

inline double bipolar(double x, double y) {
    if (x > y) return 2.0 * (x - 0.5);
    if (x < y) return 2.0 * (0.5 - y);
    return 0.0;
}

// Scaled F-scores of one category over the given two-category count table.
inline std::map<std::string, double> sfs(const std::map<std::string, std::pair<double, double>>& counts, int cat) {
    double total = 0.0;
    for (const auto& [w, c] : counts) total += cat == 0 ? c.first : c.second;
    std::vector<double> prec, freq;
    for (const auto& [w, c] : counts) {
        const double mine = cat == 0 ? c.first : c.second;
        prec.push_back(mine / (c.first + c.second));
        freq.push_back(mine / total);
    }
    auto standardize = [](std::vector<double> v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - m) * (x - m);
        const double sd = std::sqrt(var / static_cast<double>(v.size()));
        for (double& x : v) x = sd > 0.0 ? (x - m) / sd : 0.0;
        return v;
    };
    const auto zp = standardize(prec), zf = standardize(freq);
    std::map<std::string, double> out;
    std::size_t i = 0;
    for (const auto& [w, c] : counts) {
        const double a = phi(zp[i]), b = phi(zf[i]);
        out[w] = (a == 0.0 || b == 0.0) ? 0.0 : 2.0 / (1.0 / a + 1.0 / b);
        ++i;
    }
    return out;
}

}  // namespace oracle
