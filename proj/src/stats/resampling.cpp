#include "honesty/stats.hpp"

#include "honesty/error.hpp"
#include "honesty/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace honesty::stats {

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next.store(n);
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

void check_confidence(double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) throw ConfigError("confidence must lie in (0, 1)");
}

Interval percentile_interval(std::vector<double> draws, double confidence) {
    std::erase_if(draws, [](double d) { return std::isnan(d); });
    if (draws.empty()) throw InsufficientData("no valid bootstrap replicate");
    const double tail = (1.0 - confidence) / 2.0;
    return {quantile(draws, tail), quantile(draws, 1.0 - tail)};
}

}  // namespace

BootstrapResult bootstrap_ci(std::span<const double> values, const Statistic& statistic,
                             const BootstrapOptions& options) {
    if (values.empty()) throw InsufficientData("bootstrap of an empty sample");
    if (options.n_iter == 0) throw ConfigError("bootstrap needs at least one iteration");
    check_confidence(options.confidence);

    std::vector<double> draws(options.n_iter);
    parallel_for(options.n_iter, options.workers, [&](std::size_t i) {
        rng::Engine engine(rng::substream(options.seed, static_cast<std::uint64_t>(i)));
        std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
        std::vector<double> sample(values.size());
        for (auto& s : sample) s = values[pick(engine)];
        draws[i] = statistic(sample);
    });
    auto ci = percentile_interval(std::move(draws), options.confidence);
    return {statistic(values), ci.low, ci.high, options.n_iter};
}

namespace {

int month_index(corpus::Timestamp ts) {
    const std::chrono::year_month_day ymd{std::chrono::floor<std::chrono::days>(ts)};
    return static_cast<int>(ymd.year()) * 12 + static_cast<int>(static_cast<unsigned>(ymd.month())) - 1;
}

std::string month_label(int index) {
    const int year = index >= 0 ? index / 12 : (index - 11) / 12;
    const int month = index - year * 12 + 1;
    char buf[48];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
}

}  // namespace

std::map<std::string, std::vector<TimeSeriesPoint>> rolling_timeline(
    std::span<const TimelineObservation> observations, const TimelineOptions& options) {
    if (options.window == 0 || options.window % 2 == 0) throw ConfigError("rolling window must be a positive odd number of months");
    if (options.n_boot == 0) throw ConfigError("timeline bootstrap needs at least one iteration");

    std::map<std::string, std::map<int, std::vector<double>>> buckets;
    for (const auto& o : observations) {
        if (!std::isfinite(o.value)) continue;
        buckets[o.group][month_index(o.time)].push_back(o.value);
    }

    const int half = static_cast<int>(options.window / 2);
    std::map<std::string, std::vector<TimeSeriesPoint>> out;
    for (const auto& [group, months] : buckets) {
        std::map<int, double> monthly_mean;
        for (const auto& [m, vals] : months) monthly_mean[m] = mean(vals);

        auto& series = out[group];
        for (const auto& [m, unused] : months) {
            std::vector<const std::vector<double>*> window;
            double total = 0.0;
            TimeSeriesPoint point;
            point.period = month_label(m);
            for (auto it = months.lower_bound(m - half); it != months.end() && it->first <= m + half; ++it) {
                window.push_back(&it->second);
                total += monthly_mean[it->first];
                point.n += it->second.size();
            }
            point.mean = total / static_cast<double>(window.size());

            const auto base = rng::substream(options.seed, group + "|" + point.period);
            std::vector<double> draws(options.n_boot);
            parallel_for(options.n_boot, options.workers, [&](std::size_t i) {
                rng::Engine engine(rng::substream(base, static_cast<std::uint64_t>(i)));
                double acc = 0.0;
                for (const auto* vals : window) {
                    std::uniform_int_distribution<std::size_t> pick(0, vals->size() - 1);
                    double s = 0.0;
                    for (std::size_t k = 0; k < vals->size(); ++k) s += (*vals)[pick(engine)];
                    acc += s / static_cast<double>(vals->size());
                }
                draws[i] = acc / static_cast<double>(window.size());
            });
            const auto ci = percentile_interval(std::move(draws), 0.95);
            point.ci_low = ci.low;
            point.ci_high = ci.high;
            series.push_back(std::move(point));
        }
    }
    return out;
}

namespace {

struct MediationPoint {
    double acme, ade, total, prop;
    bool aliased;
};

template <class Index>
MediationPoint mediation_point(std::span<const double> x, std::span<const double> m, std::span<const double> y,
                               Index idx, std::size_t n) {
    double mx = 0, mm = 0, my = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto i = idx(k);
        mx += x[i];
        mm += m[i];
        my += y[i];
    }
    const double dn = static_cast<double>(n);
    mx /= dn;
    mm /= dn;
    my /= dn;
    double sxx = 0, sxm = 0, smm = 0, sxy = 0, smy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto i = idx(k);
        const double dx = x[i] - mx, dm = m[i] - mm, dy = y[i] - my;
        sxx += dx * dx;
        sxm += dx * dm;
        smm += dm * dm;
        sxy += dx * dy;
        smy += dm * dy;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (sxx <= 0.0 || smm <= 0.0) return {nan, nan, nan, nan, false};
    const double a = sxm / sxx;
    const double det = sxx * smm - sxm * sxm;
    MediationPoint p{};
    double b = 0.0, c = 0.0;
    if (det <= 1e-12 * sxx * smm) {
        p.aliased = true;
        b = smy / smm;
    } else {
        c = (smm * sxy - sxm * smy) / det;
        b = (sxx * smy - sxm * sxy) / det;
    }
    p.acme = a * b;
    p.ade = c;
    p.total = p.acme + p.ade;
    p.prop = p.total != 0.0 ? p.acme / p.total : nan;
    return p;
}

double tail_p(const std::vector<double>& draws) {
    std::size_t valid = 0, le = 0, ge = 0;
    for (double d : draws) {
        if (std::isnan(d)) continue;
        ++valid;
        if (d <= 0.0) ++le;
        if (d >= 0.0) ++ge;
    }
    if (valid == 0) return std::numeric_limits<double>::quiet_NaN();
    const double v = static_cast<double>(valid);
    return std::min(1.0, 2.0 * std::min(static_cast<double>(le) / v, static_cast<double>(ge) / v));
}

}  // namespace

MediationResult mediation(std::span<const double> x, std::span<const double> m, std::span<const double> y,
                          const MediationOptions& options) {
    if (x.size() != m.size() || x.size() != y.size()) throw DataError("mediation columns differ in length");
    if (x.size() < 10) throw InsufficientData("mediation needs at least ten observations");
    if (options.n_boot == 0) throw ConfigError("mediation bootstrap needs at least one iteration");
    const std::size_t n = x.size();

    const auto point = mediation_point(x, m, y, [](std::size_t k) { return k; }, n);
    if (std::isnan(point.acme)) throw DataError("mediation is undefined when treatment or mediator is constant");

    MediationResult out;
    out.acme = point.acme;
    out.ade = point.ade;
    out.total_effect = point.total;
    out.prop_mediated = point.prop;
    out.treatment_aliased = point.aliased;
    out.n_boot = options.n_boot;
    out.n_obs = n;

    std::vector<double> acme(options.n_boot), ade(options.n_boot), total(options.n_boot), prop(options.n_boot);
    parallel_for(options.n_boot, options.workers, [&](std::size_t i) {
        rng::Engine engine(rng::substream(options.seed, static_cast<std::uint64_t>(i)));
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::vector<std::size_t> rows(n);
        for (auto& r : rows) r = pick(engine);
        const auto p = mediation_point(x, m, y, [&](std::size_t k) { return rows[k]; }, n);
        acme[i] = p.acme;
        ade[i] = p.ade;
        total[i] = p.total;
        prop[i] = p.prop;
    });

    out.acme_p = tail_p(acme);
    out.ade_p = tail_p(ade);
    out.total_p = tail_p(total);
    out.prop_p = tail_p(prop);
    out.acme_ci = percentile_interval(std::move(acme), 0.95);
    out.ade_ci = percentile_interval(std::move(ade), 0.95);
    out.total_ci = percentile_interval(std::move(total), 0.95);
    bool any_prop = std::any_of(prop.begin(), prop.end(), [](double d) { return !std::isnan(d); });
    out.prop_ci = any_prop ? percentile_interval(std::move(prop), 0.95)
                           : Interval{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    return out;
}

}  // namespace honesty::stats
