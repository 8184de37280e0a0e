#pragma once

namespace dagbayes {

// log Beta(a, b)
double log_beta(double a, double b);

// Regularized incomplete beta I_x(a, b), a,b > 0, x in [0,1].
// Continued-fraction evaluation, relative tolerance ~1e-15.
double beta_reg(double a, double b, double x);

// Inverse of beta_reg in x: smallest x with I_x(a,b) = p, found by
// bisection to an interval width below 1e-13.
double beta_reg_inv(double a, double b, double p);

// Density of Beta(a, b) at x in (0,1).
double beta_pdf(double a, double b, double x);

}  // namespace dagbayes
