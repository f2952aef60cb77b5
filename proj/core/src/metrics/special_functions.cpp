#include "dronepaint/metrics/special_functions.hpp"

#include "dronepaint/error.hpp"

#include <cmath>
#include <limits>

namespace dronepaint::metrics {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 10000;

double beta_continued_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) {
        d = kTiny;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) {
            return h;
        }
    }
    return h;
}

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// I_x(a, b) with y = 1 - x supplied by the caller, so neither argument loses
// digits to cancellation.
double incomplete_beta_xy(double a, double b, double x, double y) {
    if (x <= 0.0 || y >= 1.0) {
        return 0.0;
    }
    if (y <= 0.0 || x >= 1.0) {
        return 1.0;
    }
    const double front = std::exp(a * std::log(x) + b * std::log(y) - log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

void check_shape(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) {
        fail(ErrorCode::ConfigError, "incomplete beta needs a, b > 0");
    }
}

} // namespace

double incomplete_beta(double a, double b, double x) {
    check_shape(a, b);
    if (!(x >= 0.0 && x <= 1.0)) {
        fail(ErrorCode::ConfigError, "incomplete beta needs x in [0, 1]");
    }
    return incomplete_beta_xy(a, b, x, 1.0 - x);
}

double inverse_incomplete_beta(double a, double b, double y) {
    if (!(y >= 0.0 && y <= 1.0)) {
        fail(ErrorCode::ConfigError, "inverse incomplete beta needs y in [0, 1]");
    }
    if (y == 0.0 || y == 1.0) {
        return y;
    }
    const double lb = log_beta(a, b);
    double lo = 0.0;
    double hi = 1.0;
    double x = 0.5;
    for (int iter = 0; iter < 200; ++iter) {
        const double f = incomplete_beta(a, b, x) - y;
        if (f == 0.0) {
            return x;
        }
        (f < 0.0 ? lo : hi) = x;
        const double pdf = std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - lb);
        double next = x - f / pdf;
        if (!(next > lo && next < hi) || !std::isfinite(next)) {
            next = 0.5 * (lo + hi);
        }
        if (std::fabs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(x) ||
            hi - lo <= std::numeric_limits<double>::min()) {
            return next;
        }
        x = next;
    }
    return x;
}

double student_t_cdf(double t, double dof) {
    if (!(dof > 0.0)) {
        fail(ErrorCode::ConfigError, "t distribution needs dof > 0");
    }
    if (std::isinf(t)) {
        return t > 0.0 ? 1.0 : 0.0;
    }
    const double t2 = t * t;
    const double tail = 0.5 * incomplete_beta_xy(0.5 * dof, 0.5, dof / (dof + t2), t2 / (dof + t2));
    return t > 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double dof) {
    if (!(dof > 0.0)) {
        fail(ErrorCode::ConfigError, "t distribution needs dof > 0");
    }
    if (!(p > 0.0 && p < 1.0)) {
        fail(ErrorCode::ConfigError, "t quantile needs p in (0, 1)");
    }
    if (p == 0.5) {
        return 0.0;
    }
    // Two-sided tail mass 2 * min(p, 1 - p) = I_x(dof/2, 1/2) with x = dof / (dof + t^2).
    const double tail = 2.0 * std::min(p, 1.0 - p);
    const double x = inverse_incomplete_beta(0.5 * dof, 0.5, tail);
    const double t = std::sqrt(dof * (1.0 - x) / x);
    return p > 0.5 ? t : -t;
}

double f_cdf(double f, double d1, double d2) {
    if (!(d1 > 0.0) || !(d2 > 0.0)) {
        fail(ErrorCode::ConfigError, "F distribution needs positive degrees of freedom");
    }
    if (!(f > 0.0)) {
        return 0.0;
    }
    if (std::isinf(f)) {
        return 1.0;
    }
    const double s = d1 * f + d2;
    return incomplete_beta_xy(0.5 * d1, 0.5 * d2, d1 * f / s, d2 / s);
}

double f_survival(double f, double d1, double d2) {
    if (!(d1 > 0.0) || !(d2 > 0.0)) {
        fail(ErrorCode::ConfigError, "F distribution needs positive degrees of freedom");
    }
    if (!(f > 0.0)) {
        return 1.0;
    }
    if (std::isinf(f)) {
        return 0.0;
    }
    const double s = d1 * f + d2;
    return incomplete_beta_xy(0.5 * d2, 0.5 * d1, d2 / s, d1 * f / s);
}

} // namespace dronepaint::metrics
