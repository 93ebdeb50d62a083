#pragma once

#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "bubblekit/constants.hpp"
#include "bubblekit/lattice.hpp"
#include "bubblekit/params.hpp"

namespace bubblekit {

// d_i = Lambda_i^{-(n-2s)/2}, offsets column i = P^i - X^i, theta = d - b.
struct ReducedState {
    Eigen::VectorXd b;
    Eigen::VectorXd d;
    Eigen::MatrixXd offsets;  // n x N
    Eigen::VectorXd theta;

    Eigen::VectorXd scales(const ProblemParams& p) const;
};

double F_value(const Eigen::VectorXd& z, const Eigen::MatrixXd& A, double c1, double c2, const ProblemParams& p);
Eigen::VectorXd F_gradient(const Eigen::VectorXd& z, const Eigen::MatrixXd& A, double c1, double c2,
                           const ProblemParams& p);
Eigen::MatrixXd F_hessian(const Eigen::VectorXd& z, const Eigen::MatrixXd& A, double c1, double c2,
                          const ProblemParams& p);

struct MaximizeOptions {
    double tol = 1e-12;  // on the scaled gradient
    int max_iter = 200;
};

// Damped Newton in w = log z with a gradient-ascent fallback. The gradient
// tolerance is relative to c1 * max z^{q-1}.
Eigen::VectorXd maximize_F(const Eigen::MatrixXd& A, double c1, double c2, const ProblemParams& p,
                           const MaximizeOptions& opt = {});

// Symmetric two-point maximizer (c2/c1)^{1/(q-2)}.
double two_point_maximizer(double c1, double c2, const ProblemParams& p);

struct ClaimBounds {
    double lower = 0.0;
    double upper = 0.0;
};

// From c1 b_i^{q-1} = c2 sum_h A_ih b_h and min/max row sums of A.
ClaimBounds claim_bounds(const Eigen::MatrixXd& A, double c1, double c2, const ProblemParams& p);

struct ScaleBox {
    double C1 = 0.0;
    double C2 = 0.0;
};

ScaleBox scale_box(const Eigen::VectorXd& b, const ProblemParams& p);

// C4 = 1 / ||D^2F(b)^{-1}||_inf.
double hessian_gap(const Eigen::VectorXd& b, const Eigen::MatrixXd& A, double c1, double c2, const ProblemParams& p);

// min over random x with ||x||_inf = 1 of ||H x||_inf.
double hessian_gap_sampled(const Eigen::MatrixXd& H, int samples, std::mt19937_64& rng);

// Integral Taylor remainder of the diagonal part of grad F, in closed form
// and by quadrature of the defining integral.
Eigen::VectorXd pi_remainder(const Eigen::VectorXd& b, const Eigen::VectorXd& theta, double c1,
                             const ProblemParams& p);
Eigen::VectorXd pi_remainder_quadrature(const Eigen::VectorXd& b, const Eigen::VectorXd& theta, double c1,
                                        const ProblemParams& p, double tol = 1e-13);

// Bounded maps of the fixed-point system evaluated at (P - X, theta).
struct RemainderTerms {
    Eigen::MatrixXd xi1;     // n x N
    Eigen::MatrixXd theta1;  // n x N
    Eigen::VectorXd xi2;
    Eigen::VectorXd theta2;
};

using RemainderModel = std::function<RemainderTerms(const Eigen::MatrixXd& offsets, const Eigen::VectorXd& theta)>;

RemainderModel zero_remainder(int n, int N);

// Constant maps: xi1 = xi * pattern, theta1 = c_lambda * pattern, xi2 = xi,
// theta2 = c_lambda. The default pattern alternates sign with the parity of
// the lattice index, so it is odd under the central reflection of a
// two-point lattice.
RemainderModel constant_remainder(const LatticeConfig& lat, double xi, double c_lambda);

// Fixed maps taken from measured gradient discrepancies (numeric minus
// leading term, in units of lambda^{-beta}) at a state with scales Lambda.
RemainderModel measured_remainder(const Eigen::MatrixXd& center_excess, const Eigen::VectorXd& scale_excess,
                                  const Eigen::VectorXd& scales, const Constants& c, const ProblemParams& p);

// Synthetic default 1e-2 lambda^{-0.1}.
double default_c_lambda(double lambda);

struct FixedPointOptions {
    double c_lambda = -1.0;  // <= 0 selects default_c_lambda
    double tol = 1e-10;
    int max_iter = 500;
};

struct TraceRow {
    int iter = 0;
    double residual = 0.0;
    double offset_max = 0.0;
    double theta_max = 0.0;
};

struct FixedPointResult {
    ReducedState state;
    std::vector<TraceRow> trace;
    double c_lambda = 0.0;
    double C4 = 0.0;
    double offset_radius = 0.0;  // 2 C_lambda
    double theta_radius = 0.0;   // 3 C_lambda / C4
    double residual = 0.0;
    int iterations = 0;
};

// Picard iteration of G on the box around (X, 0). Throws BoxEscape when an
// iterate leaves the box and NoConvergence when the residual stalls.
FixedPointResult fixed_point_solve(const LatticeConfig& lat, const Constants& c, const ProblemParams& p,
                                   const Eigen::VectorXd& b, const RemainderModel& model,
                                   const FixedPointOptions& opt = {});

struct AsymptoticGradient {
    Eigen::MatrixXd center;  // n x N, leading term of dI/dP^i_j
    Eigen::VectorXd scale;   // leading terms of dI/dLambda_i
    Eigen::VectorXd self_term;
    Eigen::VectorXd interaction_term;
};

AsymptoticGradient reduced_gradient_asymptotic(const Eigen::MatrixXd& offsets, const Eigen::VectorXd& scales,
                                               const Constants& c, const LatticeConfig& lat,
                                               const ProblemParams& p);

}  // namespace bubblekit
