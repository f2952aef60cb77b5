#pragma once

namespace dronepaint::metrics {

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
// Relative error around 1e-14 across the parameter ranges used for t and F tails.
double incomplete_beta(double a, double b, double x);

// Inverse of I_x(a, b) in x for y in [0, 1] (safeguarded Newton on [0, 1]).
double inverse_incomplete_beta(double a, double b, double y);

double student_t_cdf(double t, double dof);
double student_t_quantile(double p, double dof);

double f_cdf(double f, double d1, double d2);
// 1 - CDF, evaluated directly to keep small tail probabilities accurate.
double f_survival(double f, double d1, double d2);

} // namespace dronepaint::metrics
