#pragma once

#include <span>
#include <vector>

namespace dronepaint::metrics {

double mean(std::span<const double> xs);
// Unbiased (n - 1) sample variance.
double sample_variance(std::span<const double> xs);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

// mean +- t_{n-1, (1+level)/2} * s / sqrt(n). Throws ConfigError for n < 2.
Interval confidence_interval(std::span<const double> samples, double level = 0.95);

struct AnovaResult {
    double f = 0.0;
    double p = 1.0;
    double ss_between = 0.0;
    double ss_within = 0.0;
    int df_between = 0;
    int df_within = 0;
};

// One-way ANOVA. Throws ConfigError for < 2 groups, an empty group or N <= k,
// DegenerateAnova when both sums of squares vanish.
AnovaResult anova_oneway(std::span<const std::vector<double>> groups);

} // namespace dronepaint::metrics
