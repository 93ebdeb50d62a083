#pragma once

#include <vector>

#include <Eigen/Dense>

#include "bubblekit/params.hpp"

namespace bubblekit {

struct KFieldOptions {
    double cutoff_inner = 0.25;
    double cutoff_outer = 0.5;
    double saturation = 0.0;  // <= 0 selects the automatic value
    bool unit = false;        // K == 1 control field
};

struct KField {
    ProblemParams params;
    double cutoff_inner = 0.25;
    double cutoff_outer = 0.5;
    double saturation = 1.0;
    bool unit = false;
    double psi_max = 0.0;
    double k_min = 1.0;
    double k_max = 1.0;
};

KField make_kfield(const ProblemParams& p, const KFieldOptions& opt = {});

// Periodic profile psi and its derivative; t is the raw coordinate.
double kfield_psi(const KField& f, double t);
double kfield_dpsi(const KField& f, double t);
// Saturated non-periodic profile phi and its derivative.
double kfield_phi(const KField& f, double t);
double kfield_dphi(const KField& f, double t);

double k_eval(const KField& f, const Eigen::Ref<const Eigen::VectorXd>& x);
// K(x) - 1 without the cancellation of forming K first.
double k_minus_one(const KField& f, const Eigen::Ref<const Eigen::VectorXd>& x);
// K(x * scale) - 1 without forming the scaled point.
double k_minus_one_scaled(const KField& f, const Eigen::Ref<const Eigen::VectorXd>& x, double scale);
Eigen::VectorXd k_grad(const KField& f, const Eigen::Ref<const Eigen::VectorXd>& x);

struct RemainderRow {
    double radius;
    double ratio;
};

// sup over |y| = r of |K(y) - 1 - sum a_i |y_i|^beta| / r^beta, sampled on a
// deterministic direction set.
std::vector<RemainderRow> k_remainder_order(const KField& f, const std::vector<double>& radii,
                                            int directions = 2000);

}  // namespace bubblekit
