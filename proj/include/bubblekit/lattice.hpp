#pragma once

#include <Eigen/Dense>

#include "bubblekit/params.hpp"

namespace bubblekit {

struct LatticeConfig {
    ProblemParams params;
    double lambda = 1.0;
    double spacing = 1.0;      // lambda * l
    Eigen::MatrixXi integer;   // k x N lattice coordinates z
    Eigen::MatrixXd centers;   // n x N, column i is X^i

    Eigen::Index size() const { return centers.cols(); }
};

LatticeConfig build_centers(const ProblemParams& p, double lambda);

// Smallest index attaining the minimum distance.
Eigen::Index region_index(const LatticeConfig& cfg, const Eigen::Ref<const Eigen::VectorXd>& y);

double min_center_distance(const LatticeConfig& cfg, const Eigen::Ref<const Eigen::VectorXd>& y);

Eigen::MatrixXd interaction_matrix(const LatticeConfig& cfg);

double offdiag_power_sum(const LatticeConfig& cfg, Eigen::Index r, double e);

struct LatticeSumEstimate {
    double partial = 0.0;
    double tail_bound = 0.0;
    int shells = 0;
};

// sum over z in Z^k \ {0} of |spacing z|^{-e}, truncated at sup-norm shell M.
LatticeSumEstimate infinite_lattice_power_sum(int k, double spacing, double e, int shells);

double ball_radius_factor(const ProblemParams& p);  // r0 = max(m/4, 1)
bool in_ball(const LatticeConfig& cfg, Eigen::Index i, const Eigen::Ref<const Eigen::VectorXd>& y);
bool in_ball_m(const LatticeConfig& cfg, Eigen::Index i, const Eigen::Ref<const Eigen::VectorXd>& y);

}  // namespace bubblekit
