#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "otcnet/common.hpp"
#include "otcnet/detail/random.hpp"

namespace otcnet {

/// Gini coefficient, half of the relative mean absolute difference:
/// G = sum_ij |x_i - x_j| / (2 n^2 mean). 0 for equal values, (n-1)/n for a
/// single nonzero value.
inline double gini(std::span<const double> values) {
    if (values.empty()) throw ValidationError("gini: empty sample");
    std::vector<double> x(values.begin(), values.end());
    for (double v : x)
        if (v < 0) throw ValidationError("gini: negative value");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double total = std::accumulate(x.begin(), x.end(), 0.0);
    if (total <= 0) throw ValidationError("gini: all values are zero");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += (2.0 * (i + 1) - n - 1.0) * x[i];
    return acc / (n * total);
}

/// Adjusted Fisher-Pearson sample skewness, g1 * sqrt(n(n-1)) / (n-2).
inline double sample_skewness(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 3) throw ValidationError("skewness: need at least 3 observations");
    double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double m2 = 0.0, m3 = 0.0;
    for (double v : values) {
        double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    if (m2 <= 0) throw ValidationError("skewness: zero variance");
    double g1 = m3 / std::pow(m2, 1.5);
    return g1 * std::sqrt(static_cast<double>(n) * (n - 1)) / (n - 2);
}

struct LognormalFit {
    double mu = 0.0;
    double sigma = 1.0;
};

enum class FitNormalization { unnormalized, unit_sum };

namespace detail {

/// Log of the log-normal density evaluated at rank r (x = ln r).
inline double lognormal_rank_log_model(double x, double mu, double sigma) {
    double z = (x - mu) / sigma;
    return -x - std::log(sigma) - 0.5 * std::log(2.0 * 3.14159265358979323846) - 0.5 * z * z;
}

}  // namespace detail

/// Fits the rank-indexed log-normal density shape
///   A(R) = 1/(R sigma sqrt(2 pi)) exp(-(ln R - mu)^2 / (2 sigma^2))
/// to activities ordered by rank 1..n, by nonlinear least squares on the
/// log-residuals. With unit_sum normalization the activities are scaled to
/// unit total before fitting. Noiseless model data is recovered exactly.
inline LognormalFit fit_lognormal_rank(std::span<const double> activity_by_rank,
                                       FitNormalization normalization = FitNormalization::unnormalized) {
    const std::size_t n = activity_by_rank.size();
    if (n < 3) throw ValidationError("fit_lognormal_rank: need at least 3 points");
    std::vector<double> y(n), x(n);
    double total = 0.0;
    for (double a : activity_by_rank) {
        if (a <= 0) throw ValidationError("fit_lognormal_rank: activities must be positive");
        total += a;
    }
    double scale = normalization == FitNormalization::unit_sum ? total : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::log(static_cast<double>(i + 1));
        y[i] = std::log(activity_by_rank[i] / scale);
    }

    // The log-model is quadratic in ln R, so an unconstrained quadratic
    // regression of (y + x) on x yields an exact starting point whenever the
    // data follows the model; Levenberg-Marquardt then minimizes the true
    // two-parameter objective.
    double s0 = static_cast<double>(n), s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    double t0 = 0, t1 = 0, t2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double u = y[i] + x[i];
        s1 += x[i];
        s2 += x[i] * x[i];
        s3 += x[i] * x[i] * x[i];
        s4 += x[i] * x[i] * x[i] * x[i];
        t0 += u;
        t1 += u * x[i];
        t2 += u * x[i] * x[i];
    }
    // solve the 3x3 normal equations for c0 + c1 x + c2 x^2
    double m[3][4] = {{s0, s1, s2, t0}, {s1, s2, s3, t1}, {s2, s3, s4, t2}};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        std::swap(m[piv], m[col]);
        for (int r = 0; r < 3; ++r) {
            if (r == col || m[col][col] == 0.0) continue;
            double f = m[r][col] / m[col][col];
            for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
        }
    }
    double c1 = m[1][1] != 0.0 ? m[1][3] / m[1][1] : 0.0;
    double c2 = m[2][2] != 0.0 ? m[2][3] / m[2][2] : 0.0;

    double mu, log_sigma;
    if (c2 < -1e-12) {
        double sigma2 = -0.5 / c2;
        mu = c1 * sigma2;
        log_sigma = 0.5 * std::log(sigma2);
    } else {
        mu = 0.0;
        log_sigma = 0.0;
    }

    auto residual_norm = [&](double m_, double ls_) {
        double sig = std::exp(ls_);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = y[i] - detail::lognormal_rank_log_model(x[i], m_, sig);
            ss += r * r;
        }
        return ss;
    };

    double lambda = 1e-3;
    double cost = residual_norm(mu, log_sigma);
    for (int iter = 0; iter < 200; ++iter) {
        double sig = std::exp(log_sigma);
        // J^T J and J^T r for parameters (mu, log sigma)
        double a11 = 0, a12 = 0, a22 = 0, g1 = 0, g2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double z = (x[i] - mu) / sig;
            double r = y[i] - detail::lognormal_rank_log_model(x[i], mu, sig);
            double dmu = z / sig;              // d model / d mu
            double dls = z * z - 1.0;          // d model / d log sigma
            a11 += dmu * dmu;
            a12 += dmu * dls;
            a22 += dls * dls;
            g1 += dmu * r;
            g2 += dls * r;
        }
        double d11 = a11 * (1 + lambda), d22 = a22 * (1 + lambda);
        double det = d11 * d22 - a12 * a12;
        if (std::abs(det) < 1e-300) break;
        double step_mu = (d22 * g1 - a12 * g2) / det;
        double step_ls = (d11 * g2 - a12 * g1) / det;
        double trial_cost = residual_norm(mu + step_mu, log_sigma + step_ls);
        if (trial_cost < cost) {
            mu += step_mu;
            log_sigma += step_ls;
            if (cost - trial_cost < 1e-15 * (1.0 + cost)) {
                cost = trial_cost;
                break;
            }
            cost = trial_cost;
            lambda = std::max(lambda * 0.3, 1e-12);
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }
    return {mu, std::exp(log_sigma)};
}

/// Moment estimator of a log-normal law: mean and standard deviation of the
/// log values (the estimator matching a QQ or two-sample comparison of the
/// raw values against the fitted law).
inline LognormalFit fit_lognormal_moments(std::span<const double> values) {
    if (values.size() < 2) throw ValidationError("fit_lognormal_moments: need at least 2 points");
    std::vector<double> logs;
    logs.reserve(values.size());
    for (double v : values) {
        if (v <= 0) throw ValidationError("fit_lognormal_moments: values must be positive");
        logs.push_back(std::log(v));
    }
    double mean = std::accumulate(logs.begin(), logs.end(), 0.0) / logs.size();
    double ss = 0.0;
    for (double l : logs) ss += (l - mean) * (l - mean);
    double sd = std::sqrt(ss / (logs.size() - 1));
    if (sd <= 0) throw ValidationError("fit_lognormal_moments: zero variance in logs");
    return {mean, sd};
}

// ---------------------------------------------------------------------------
// Two-sample Kolmogorov-Smirnov machinery

/// Exact sup-distance between the empirical CDFs of two samples.
inline double ks_two_sample_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ValidationError("ks statistic: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t ia = 0, ib = 0;
    double d = 0.0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] <= b[ib])
            ++ia;
        else
            ++ib;
        d = std::max(d, std::abs(ia / na - ib / nb));
    }
    return d;
}

/// Exact null p-value P(D >= d) for the two-sample KS statistic, computed by
/// counting monotone lattice paths that stay strictly inside the band
/// |i/n - j/m| < d (the same method statistical packages use at these sizes).
inline double ks_two_sample_pvalue(double d, int n, int m) {
    if (n <= 0 || m <= 0) throw ValidationError("ks p-value: sample sizes must be positive");
    if (d <= 0) return 1.0;
    if (d > 1) return 0.0;
    std::vector<double> prev(m + 1, 0.0), cur(m + 1, 0.0);
    const double eps = 1e-12;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= m; ++j) {
            if (i == 0 && j == 0) {
                cur[0] = 1.0;
                continue;
            }
            if (std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m) >= d - eps) {
                cur[j] = 0.0;
                continue;
            }
            double acc = 0.0;
            if (i > 0) acc += prev[j] * (static_cast<double>(i) / (i + j));
            if (j > 0) acc += cur[j - 1] * (static_cast<double>(j) / (i + j));
            cur[j] = acc;
        }
        std::swap(prev, cur);
    }
    double p = 1.0 - prev[m];
    return std::min(1.0, std::max(0.0, p));
}

struct KsConfig {
    int trials = 10000;
    double p_threshold = 0.10;
    std::uint64_t seed = 1;
};

struct KsResult {
    int trials = 0;
    double p_threshold = 0.0;
    int passes = 0;  // trials whose p-value did not fall below the threshold
    std::uint64_t seed = 0;
    std::string prng = "mt19937_64/as241";
};

/// Draws `trials` synthetic samples of the empirical sample's size from
/// LogNormal(mu, sigma) and counts two-sample KS non-rejections at the given
/// threshold. Per-trial seeds are derived with SplitMix64, so the count is
/// reproducible and independent of evaluation order.
inline KsResult ks_montecarlo(std::span<const double> sample, double mu, double sigma,
                              const KsConfig& cfg) {
    if (cfg.trials < 1) throw ValidationError("ks_montecarlo: trials must be >= 1");
    if (!(cfg.p_threshold > 0.0 && cfg.p_threshold < 1.0))
        throw ValidationError("ks_montecarlo: p threshold must lie in (0,1)");
    if (sample.size() < 3) throw ValidationError("ks_montecarlo: sample too small");
    if (!(sigma > 0.0)) throw ValidationError("ks_montecarlo: sigma must be positive");

    std::vector<double> empirical(sample.begin(), sample.end());
    std::sort(empirical.begin(), empirical.end());
    const int n = static_cast<int>(empirical.size());

    // D takes values on a fixed grid for fixed sizes; memoize p-values.
    std::vector<double> synthetic(n);
    KsResult result;
    result.trials = cfg.trials;
    result.p_threshold = cfg.p_threshold;
    result.seed = cfg.seed;
    for (int trial = 0; trial < cfg.trials; ++trial) {
        std::mt19937_64 eng(detail::splitmix64(cfg.seed + 0x632be59bd9b4e019ULL * trial));
        for (int k = 0; k < n; ++k) synthetic[k] = std::exp(mu + sigma * detail::normal_draw(eng));
        double d = ks_two_sample_statistic(empirical, synthetic);
        if (ks_two_sample_pvalue(d, n, n) >= cfg.p_threshold) ++result.passes;
    }
    return result;
}

}  // namespace otcnet
