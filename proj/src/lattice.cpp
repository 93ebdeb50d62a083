#include "bubblekit/lattice.hpp"

#include <cmath>

#include "bubblekit/error.hpp"

namespace bubblekit {

LatticeConfig build_centers(const ProblemParams& p, double lambda) {
    LatticeConfig cfg;
    cfg.params = p;
    cfg.lambda = lambda;
    cfg.spacing = lambda * p.l;
    const int N = p.bubble_count();
    cfg.integer.resize(p.k, N);
    cfg.centers = Eigen::MatrixXd::Zero(p.n, N);
    Eigen::VectorXi z = Eigen::VectorXi::Zero(p.k);
    for (int i = 0; i < N; ++i) {
        cfg.integer.col(i) = z;
        for (int j = 0; j < p.k; ++j) cfg.centers(j, i) = cfg.spacing * z[j];
        // Lexicographic increment: last coordinate varies fastest.
        for (int j = p.k - 1; j >= 0; --j) {
            if (++z[j] <= p.m) break;
            z[j] = 0;
        }
    }
    return cfg;
}

Eigen::Index region_index(const LatticeConfig& cfg, const Eigen::Ref<const Eigen::VectorXd>& y) {
    Eigen::Index best = 0;
    (cfg.centers.colwise() - y).colwise().squaredNorm().minCoeff(&best);
    return best;
}

double min_center_distance(const LatticeConfig& cfg, const Eigen::Ref<const Eigen::VectorXd>& y) {
    return std::sqrt((cfg.centers.colwise() - y).colwise().squaredNorm().minCoeff());
}

Eigen::MatrixXd interaction_matrix(const LatticeConfig& cfg) {
    const Eigen::Index N = cfg.size();
    const double e = cfg.params.n - 2.0 * cfg.params.s;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index h = i + 1; h < N; ++h) {
            double d2 = (cfg.integer.col(i) - cfg.integer.col(h)).cast<double>().squaredNorm();
            A(i, h) = A(h, i) = std::pow(d2, -0.5 * e);
        }
    return A;
}

double offdiag_power_sum(const LatticeConfig& cfg, Eigen::Index r, double e) {
    if (!(e > cfg.params.k))
        throw DivergentSum("offdiag_power_sum: exponent must exceed k for the lattice sum to converge");
    double acc = 0.0;
    for (Eigen::Index j = 0; j < cfg.size(); ++j) {
        if (j == r) continue;
        acc += std::pow((cfg.centers.col(j) - cfg.centers.col(r)).norm(), -e);
    }
    return acc;
}

LatticeSumEstimate infinite_lattice_power_sum(int k, double spacing, double e, int shells) {
    if (!(e > k)) throw DivergentSum("infinite_lattice_power_sum: exponent must exceed k");
    LatticeSumEstimate out;
    out.shells = shells;
    Eigen::VectorXi z = Eigen::VectorXi::Constant(k, -shells);
    const int side = 2 * shells + 1;
    long total = 1;
    for (int j = 0; j < k; ++j) total *= side;
    for (long c = 0; c < total; ++c) {
        double d2 = z.cast<double>().squaredNorm();
        if (d2 > 0) out.partial += std::pow(d2, -0.5 * e);
        for (int j = k - 1; j >= 0; --j) {
            if (++z[j] <= shells) break;
            z[j] = -shells;
        }
    }
    out.partial *= std::pow(spacing, -e);
    // Shell j holds at most 2k(3j)^{k-1} points, all at distance >= j.
    out.tail_bound = 2.0 * k * std::pow(3.0, k - 1) / (e - k) * std::pow(spacing, -e) *
                     std::pow(static_cast<double>(shells), k - e);
    return out;
}

double ball_radius_factor(const ProblemParams& p) { return std::max(p.m / 4.0, 1.0); }

bool in_ball(const LatticeConfig& cfg, Eigen::Index i, const Eigen::Ref<const Eigen::VectorXd>& y) {
    return (y - cfg.centers.col(i)).norm() < cfg.spacing;
}

bool in_ball_m(const LatticeConfig& cfg, Eigen::Index i, const Eigen::Ref<const Eigen::VectorXd>& y) {
    return (y - cfg.centers.col(i)).norm() < ball_radius_factor(cfg.params) * cfg.spacing;
}

}  // namespace bubblekit
