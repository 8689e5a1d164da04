#pragma once

#include "honesty/corpus.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace honesty::stats {

// ---------------------------------------------------------------------------
// Descriptive helpers

double mean(std::span<const double> xs);
/// Sample variance (n - 1 denominator).
double variance(std::span<const double> xs);
/// Linear-interpolation quantile at position p * (n - 1) of the sorted sample.
double quantile(std::span<const double> xs, double p);

/// Two-sided p-value of a t statistic with df degrees of freedom.
double t_two_sided_p(double t, double df);

// ---------------------------------------------------------------------------
// Regression

struct DesignRow {
    double belief = 0.0;  // D'_b
    double truth = 0.0;   // D'_t
    corpus::Party party = corpus::Party::Democrat;
};

struct DesignMatrix {
    Eigen::MatrixXd x;
    std::vector<std::string> term_names;
};

/// Intercept, D_b, D_t, P, D_b:D_t, D_b:P, D_t:P, D_b:D_t:P where P is the
/// dummy of the non-baseline party. Throws DataError for Other-party rows or
/// when only one party is present.
DesignMatrix build_design_matrix(std::span<const DesignRow> rows,
                                 corpus::Party baseline = corpus::Party::Democrat);

struct RegressionResult {
    std::vector<std::string> term_names;
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<double> t_values;
    std::vector<double> p_values;
    std::vector<double> ci_low;   // 95%
    std::vector<double> ci_high;  // 95%
    std::size_t n_obs = 0;
    double df_resid = 0.0;
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    double log_likelihood = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    double durbin_watson = 0.0;
    std::vector<double> residuals;
};

struct OlsOptions {
    /// Parameters estimated outside X (absorbed group intercepts); they reduce
    /// the residual degrees of freedom.
    std::size_t absorbed_parameters = 0;
};

/// Householder-QR least squares. SE from sigma^2 (X'X)^-1 with
/// sigma^2 = SSR / (n - k - absorbed); two-sided t p-values; Gaussian
/// log-likelihood with variance SSR / n; AIC = 2k - 2 lnL; BIC = k ln n - 2 lnL;
/// Durbin-Watson on residuals in row order. Throws RankDeficient or
/// InsufficientData when n <= k.
RegressionResult ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     std::vector<std::string> term_names = {}, const OlsOptions& options = {});

struct AbsorbedData {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::vector<std::string> term_names;
    std::vector<std::string> dropped_terms;  // constant within every group
    std::map<std::string, std::size_t> group_sizes;
};

/// Within-group demeaning of y and every column of x (fixed-effects
/// transformation). Columns that vanish after demeaning, such as the
/// intercept or a group-level dummy, are dropped and reported.
AbsorbedData absorb_group_intercepts(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                     std::span<const std::string> groups,
                                     std::vector<std::string> term_names = {});

/// ols on the absorbed data with the group count charged to the residual df.
RegressionResult fixed_effects_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   std::span<const std::string> groups,
                                   std::vector<std::string> term_names = {});

// ---------------------------------------------------------------------------
// Tests and effect sizes

enum class TTestMode { Paired, Welch, Pooled };

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    double df = 0.0;
    double cohens_d = 0.0;
    double mean_difference = 0.0;
    /// Zero variance: t is 0 (no difference) or +-infinity.
    bool degenerate = false;
};

/// Cohen's d uses the pooled SD for unpaired modes and the SD of the
/// differences for paired mode.
TTestResult t_test(std::span<const double> a, std::span<const double> b, TTestMode mode = TTestMode::Welch);

struct Correlation {
    double r = 0.0;
    double p = 1.0;
    std::size_t n = 0;
};

/// Pearson correlation with a t-transform p-value (n - 2 df).
Correlation pearson_r(std::span<const double> x, std::span<const double> y);

struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocResult {
    double auc = 0.0;
    std::vector<RocPoint> curve;  // from (0,0) to (1,1), one point per distinct threshold
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

/// AUC as the Mann-Whitney statistic U / (n+ n-) with ties counted as 1/2.
RocResult roc_auc(std::span<const double> scores, std::span<const int> labels);

struct GroupDeviation {
    double mean = 0.0;
    double deviation = 0.0;  // group mean minus the pooled mean
    std::size_t n = 0;
};

/// <D>_group - <D>_all for every group key.
std::map<std::string, GroupDeviation> group_mean_deviation(std::span<const double> values,
                                                           std::span<const std::string> groups);

/// Krippendorff's alpha for two coders, nominal labels, no missing values.
/// Throws DataError when the pooled labels show no variation.
double krippendorff_alpha(std::span<const int> coder_a, std::span<const int> coder_b);

// ---------------------------------------------------------------------------
// Resampling

using Statistic = std::function<double(std::span<const double>)>;

struct BootstrapResult {
    double point = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n_iter = 0;
};

struct BootstrapOptions {
    std::size_t n_iter = 1000;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    double confidence = 0.95;
};

/// Percentile bootstrap. Iteration i draws from its own substream of the
/// seed, so the result does not depend on the worker count.
BootstrapResult bootstrap_ci(std::span<const double> values, const Statistic& statistic,
                             const BootstrapOptions& options);

/// Calls body(i) for every i in [0, n) on up to workers threads.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body);

struct TimelineObservation {
    corpus::Timestamp time{};
    std::string group;
    double value = 0.0;
};

struct TimeSeriesPoint {
    std::string period;  // YYYY-MM
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n = 0;  // observations inside the window
};

struct TimelineOptions {
    /// Centered window in months; must be odd.
    std::size_t window = 3;
    std::size_t n_boot = 1000;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

/// Per group: monthly means, then a centered rolling mean over the calendar
/// months of the window that have data. The CI resamples observations within
/// each month of the window.
std::map<std::string, std::vector<TimeSeriesPoint>> rolling_timeline(
    std::span<const TimelineObservation> observations, const TimelineOptions& options = {});

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

struct MediationResult {
    double acme = 0.0;
    double ade = 0.0;
    double total_effect = 0.0;
    double prop_mediated = 0.0;
    Interval acme_ci, ade_ci, total_ci, prop_ci;
    double acme_p = 1.0, ade_p = 1.0, total_p = 1.0, prop_p = 1.0;
    std::size_t n_boot = 0;
    std::size_t n_obs = 0;
    /// x is collinear with m in the outcome model; the direct effect is 0.
    bool treatment_aliased = false;
};

struct MediationOptions {
    std::size_t n_boot = 10000;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

/// m ~ x (slope a) and y ~ x + m (slopes c', b). ACME = a b, ADE = c',
/// total = a b + c'. Percentile bootstrap CIs over resampled rows; p-values
/// are twice the smaller tail share of bootstrap draws beyond 0.
MediationResult mediation(std::span<const double> x, std::span<const double> m,
                          std::span<const double> y, const MediationOptions& options = {});

}  // namespace honesty::stats
