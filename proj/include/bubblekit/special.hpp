#pragma once

namespace bubblekit {

// Lanczos approximation, g = 7, nine coefficients. Reflection below 1/2.
double gamma_fn(double z);
double lgamma_fn(double z);

// Surface area of the unit sphere S^{n-1} in R^n.
double sphere_area(int n);

// Integral over R^n of (1+|y|^2)^{-q}; needs q > n/2.
double beta_radial_integral(int n, double q);

// Integral over R^n of |x_1|^b (1+|x|^2)^{-q}; needs b > -1 and q > (n+b)/2.
double abs_moment_integral(int n, double b, double q);

}  // namespace bubblekit
