#include "dronepaint/metrics/statistics.hpp"

#include "dronepaint/error.hpp"
#include "dronepaint/metrics/special_functions.hpp"

#include <cmath>
#include <limits>

namespace dronepaint::metrics {

double mean(std::span<const double> xs) {
    if (xs.empty()) {
        fail(ErrorCode::ConfigError, "mean of an empty sample");
    }
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    return sum / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) {
        fail(ErrorCode::ConfigError, "sample variance needs at least 2 values");
    }
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - m) * (x - m);
    }
    return ss / static_cast<double>(xs.size() - 1);
}

Interval confidence_interval(std::span<const double> samples, double level) {
    if (samples.size() < 2) {
        fail(ErrorCode::ConfigError, "confidence interval needs at least 2 samples");
    }
    if (!(level > 0.0 && level < 1.0)) {
        fail(ErrorCode::ConfigError, "confidence level must lie in (0, 1)");
    }
    const double n = static_cast<double>(samples.size());
    const double m = mean(samples);
    const double se = std::sqrt(sample_variance(samples) / n);
    const double t = student_t_quantile(0.5 * (1.0 + level), n - 1.0);
    return {m - t * se, m + t * se};
}

AnovaResult anova_oneway(std::span<const std::vector<double>> groups) {
    if (groups.size() < 2) {
        fail(ErrorCode::ConfigError, "ANOVA needs at least 2 groups");
    }
    std::size_t total = 0;
    for (const auto& g : groups) {
        if (g.empty()) {
            fail(ErrorCode::ConfigError, "ANOVA group is empty");
        }
        total += g.size();
    }
    const std::size_t k = groups.size();
    if (total <= k) {
        fail(ErrorCode::ConfigError, "ANOVA needs more observations than groups");
    }

    double grand = 0.0;
    for (const auto& g : groups) {
        for (double x : g) {
            grand += x;
        }
    }
    grand /= static_cast<double>(total);

    AnovaResult r;
    for (const auto& g : groups) {
        const double m = mean(g);
        r.ss_between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
        for (double x : g) {
            r.ss_within += (x - m) * (x - m);
        }
    }
    r.df_between = static_cast<int>(k - 1);
    r.df_within = static_cast<int>(total - k);

    if (r.ss_within == 0.0) {
        if (r.ss_between == 0.0) {
            fail(ErrorCode::DegenerateAnova, "all observations are identical");
        }
        r.f = std::numeric_limits<double>::infinity();
        r.p = 0.0;
        return r;
    }
    r.f = (r.ss_between / r.df_between) / (r.ss_within / r.df_within);
    r.p = f_survival(r.f, r.df_between, r.df_within);
    return r;
}

} // namespace dronepaint::metrics
