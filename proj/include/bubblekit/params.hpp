#pragma once

#include <Eigen/Dense>

namespace bubblekit {

struct ProblemParams {
    int n = 3;
    double s = 0.4;
    int k = 1;
    double beta = 2.5;
    double tau = 1.05;
    int m = 1;
    int l = 2;
    Eigen::VectorXd a;
    double delta0 = 0.05;

    // Derived exponents, filled by validate_params.
    double alpha = 0.0;  // (n-2s)/2
    double p = 0.0;      // (n+2s)/(n-2s)
    double q = 0.0;      // 2 beta/(n-2s)
    double lambda_exponent = 0.0;

    int bubble_count() const;
};

ProblemParams default_params();

ProblemParams validate_params(const ProblemParams& p);

double derive_lambda(const ProblemParams& p);

}  // namespace bubblekit
