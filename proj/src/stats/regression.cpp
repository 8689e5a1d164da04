#include "honesty/stats.hpp"

#include "honesty/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

namespace honesty::stats {

double t_two_sided_p(double t, double df) {
    if (std::isnan(t) || !(df > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return 0.0;
    boost::math::students_t dist(df);
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

DesignMatrix build_design_matrix(std::span<const DesignRow> rows, corpus::Party baseline) {
    if (baseline == corpus::Party::Other) throw ConfigError("baseline party must be Democrat or Republican");
    const auto other = baseline == corpus::Party::Democrat ? corpus::Party::Republican : corpus::Party::Democrat;
    const std::string p(corpus::to_string(other));

    DesignMatrix design;
    design.term_names = {"Intercept", "D_b",       "D_t",       p,
                         "D_b:D_t",   "D_b:" + p, "D_t:" + p, "D_b:D_t:" + p};
    design.x.resize(static_cast<Eigen::Index>(rows.size()), 8);
    bool seen_base = false, seen_other = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.party == corpus::Party::Other) {
            throw DataError("design rows must belong to the Democrat or Republican party");
        }
        const double d = r.party == other ? 1.0 : 0.0;
        (d == 1.0 ? seen_other : seen_base) = true;
        const double b = r.belief, t = r.truth;
        design.x.row(static_cast<Eigen::Index>(i)) << 1.0, b, t, d, b * t, b * d, t * d, b * t * d;
    }
    if (!seen_base || !seen_other) {
        throw DataError("party dummy needs observations from both parties");
    }
    return design;
}

RegressionResult ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     std::vector<std::string> term_names, const OlsOptions& options) {
    const auto n = static_cast<std::size_t>(x.rows());
    const auto k = static_cast<std::size_t>(x.cols());
    if (static_cast<std::size_t>(y.size()) != n) throw DataError("response length differs from design rows");
    if (k == 0) throw DataError("design matrix has no columns");
    if (n <= k + options.absorbed_parameters) {
        throw InsufficientData("regression needs more observations than parameters");
    }
    if (!x.allFinite() || !y.allFinite()) throw DataError("regression input contains non-finite values");
    if (term_names.empty()) {
        for (std::size_t j = 0; j < k; ++j) term_names.push_back("x" + std::to_string(j));
    }
    if (term_names.size() != k) throw DataError("term name count differs from design columns");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (static_cast<std::size_t>(qr.rank()) < k) throw RankDeficient();

    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd resid = y - x * beta;
    const double ssr = resid.squaredNorm();

    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(x.cols(), x.cols()).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(x.cols(), x.cols()));
    const auto& perm = qr.colsPermutation();
    const Eigen::MatrixXd xtx_inv = perm * (r_inv * r_inv.transpose()) * perm.transpose();

    RegressionResult out;
    out.term_names = std::move(term_names);
    out.n_obs = n;
    out.df_resid = static_cast<double>(n - k - options.absorbed_parameters);
    const double sigma2 = ssr / out.df_resid;

    boost::math::students_t dist(out.df_resid);
    const double tcrit = boost::math::quantile(boost::math::complement(dist, 0.025));
    for (std::size_t j = 0; j < k; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        const double b = beta(jj);
        const double se = std::sqrt(std::max(0.0, sigma2 * xtx_inv(jj, jj)));
        const double t = se > 0.0 ? b / se
                         : b == 0.0 ? 0.0
                                    : std::copysign(std::numeric_limits<double>::infinity(), b);
        out.coefficients.push_back(b);
        out.std_errors.push_back(se);
        out.t_values.push_back(t);
        out.p_values.push_back(t_two_sided_p(t, out.df_resid));
        out.ci_low.push_back(b - tcrit * se);
        out.ci_high.push_back(b + tcrit * se);
    }

    const double ybar = y.mean();
    const double sst = (y.array() - ybar).square().sum();
    const double dn = static_cast<double>(n);
    out.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 0.0;
    out.adj_r_squared = 1.0 - (1.0 - out.r_squared) * (dn - 1.0) / out.df_resid;
    out.log_likelihood = ssr > 0.0
                             ? -0.5 * dn * (std::log(2.0 * std::numbers::pi) + std::log(ssr / dn) + 1.0)
                             : std::numeric_limits<double>::infinity();
    const double dk = static_cast<double>(k);
    out.aic = 2.0 * dk - 2.0 * out.log_likelihood;
    out.bic = dk * std::log(dn) - 2.0 * out.log_likelihood;
    double num = 0.0;
    for (Eigen::Index i = 1; i < resid.size(); ++i) num += (resid(i) - resid(i - 1)) * (resid(i) - resid(i - 1));
    out.durbin_watson = ssr > 0.0 ? num / ssr : std::numeric_limits<double>::quiet_NaN();
    out.residuals.assign(resid.data(), resid.data() + resid.size());
    return out;
}

AbsorbedData absorb_group_intercepts(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                     std::span<const std::string> groups,
                                     std::vector<std::string> term_names) {
    const auto n = x.rows();
    if (y.size() != n || static_cast<Eigen::Index>(groups.size()) != n) {
        throw DataError("absorb: rows, response and group keys differ in length");
    }
    if (term_names.empty()) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) term_names.push_back("x" + std::to_string(j));
    }
    if (static_cast<Eigen::Index>(term_names.size()) != x.cols()) {
        throw DataError("term name count differs from design columns");
    }

    std::unordered_map<std::string_view, std::size_t> index;
    std::vector<std::size_t> group_of(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        auto [it, inserted] = index.try_emplace(groups[static_cast<std::size_t>(i)], index.size());
        group_of[static_cast<std::size_t>(i)] = it->second;
    }
    const std::size_t g = index.size();

    Eigen::MatrixXd joined(n, x.cols() + 1);
    joined << x, y;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g), joined.cols());
    std::vector<double> counts(g, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto gi = group_of[static_cast<std::size_t>(i)];
        sums.row(static_cast<Eigen::Index>(gi)) += joined.row(i);
        counts[gi] += 1.0;
    }
    for (std::size_t gi = 0; gi < g; ++gi) sums.row(static_cast<Eigen::Index>(gi)) /= counts[gi];
    for (Eigen::Index i = 0; i < n; ++i) {
        joined.row(i) -= sums.row(static_cast<Eigen::Index>(group_of[static_cast<std::size_t>(i)]));
    }

    AbsorbedData out;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double scale = std::max(1.0, x.col(j).cwiseAbs().maxCoeff());
        if (joined.col(j).cwiseAbs().maxCoeff() <= 1e-12 * scale) {
            out.dropped_terms.push_back(term_names[static_cast<std::size_t>(j)]);
        } else {
            keep.push_back(j);
            out.term_names.push_back(term_names[static_cast<std::size_t>(j)]);
        }
    }
    out.x.resize(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) out.x.col(static_cast<Eigen::Index>(c)) = joined.col(keep[c]);
    out.y = joined.col(x.cols());
    for (const auto& [key, gi] : index) out.group_sizes[std::string(key)] = static_cast<std::size_t>(counts[gi]);
    return out;
}

RegressionResult fixed_effects_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   std::span<const std::string> groups, std::vector<std::string> term_names) {
    auto absorbed = absorb_group_intercepts(x, y, groups, std::move(term_names));
    if (absorbed.x.cols() == 0) throw DataError("no regressor varies within groups");
    OlsOptions options;
    options.absorbed_parameters = absorbed.group_sizes.size();
    return ols(absorbed.x, absorbed.y, absorbed.term_names, options);
}

}  // namespace honesty::stats
