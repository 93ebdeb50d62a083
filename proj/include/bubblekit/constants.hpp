#pragma once

#include "bubblekit/cache.hpp"
#include "bubblekit/params.hpp"
#include "bubblekit/quad.hpp"

namespace bubblekit {

struct Constants {
    double C0 = 0.0;
    double c0 = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0;
    QuadResult base_integral;  // int (1+|y|^2)^{-(n+2s)/2}
    QuadResult moment_n;       // int |x_1|^beta (1+|x|^2)^{-n}
    QuadResult moment_n1;      // int |x_1|^beta (1+|x|^2)^{-(n+1)}
};

// int |x_1|^b (1+|x|^2)^{-q} dx as a one-dimensional integral in x_1 of a
// radial integral over the remaining n-1 coordinates.
QuadResult abs_moment_split(int n, double b, double q, double tol);

// The same integral straight over R^n with the polar cell integrator.
QuadResult abs_moment_direct(int n, double b, double q, double tol);

Constants compute_constants(const ProblemParams& p, double tol = 1e-10, const QuadCache& cache = {});

}  // namespace bubblekit
