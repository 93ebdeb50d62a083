#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "bubblekit/kfield.hpp"

namespace bubblekit {

template <class Scalar>
using PointT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

double c0_constant(int n, double s);

// Exponents and normalization shared by every bubble in dimension n, order s.
template <class Scalar>
struct BubbleFamilyT {
    int n = 3;
    Scalar s = Scalar(0.4);
    Scalar C0 = Scalar(1);
    Scalar alpha = Scalar(1);  // (n-2s)/2
    Scalar p = Scalar(1);      // (n+2s)/(n-2s)
};
using BubbleFamily = BubbleFamilyT<double>;

BubbleFamily make_family(int n, double s);

template <class Scalar>
struct BubbleT {
    PointT<Scalar> center;
    Scalar scale = Scalar(1);
};
using Bubble = BubbleT<double>;

struct BubbleCloud {
    BubbleFamily family;
    std::vector<Bubble> bubbles;
    double lambda = 1.0;
};

// Radial forms in terms of rho = Lambda^2 |x - P|^2.
template <class Scalar>
Scalar bubble_profile(const BubbleFamilyT<Scalar>& f, Scalar scale, Scalar rho) {
    using std::pow;
    return f.C0 * pow(scale, f.alpha) * pow(Scalar(1) + rho, -f.alpha);
}

template <class Scalar, class Derived>
Scalar bubble_eval(const BubbleFamilyT<Scalar>& f, const BubbleT<Scalar>& b,
                   const Eigen::MatrixBase<Derived>& x) {
    Scalar rho = b.scale * b.scale * (x - b.center).squaredNorm();
    return bubble_profile(f, b.scale, rho);
}

template <class Scalar, class Derived>
Scalar bubble_grad_center(const BubbleFamilyT<Scalar>& f, const BubbleT<Scalar>& b, int j,
                          const Eigen::MatrixBase<Derived>& x) {
    using std::pow;
    Scalar L = b.scale;
    Scalar rho = L * L * (x - b.center).squaredNorm();
    return Scalar(2) * f.alpha * f.C0 * pow(L, f.alpha + Scalar(2)) * (x[j] - b.center[j]) *
           pow(Scalar(1) + rho, -f.alpha - Scalar(1));
}

template <class Scalar, class Derived>
Scalar bubble_grad_scale(const BubbleFamilyT<Scalar>& f, const BubbleT<Scalar>& b,
                         const Eigen::MatrixBase<Derived>& x) {
    using std::pow;
    Scalar L = b.scale;
    Scalar rho = L * L * (x - b.center).squaredNorm();
    return f.C0 * f.alpha * pow(L, f.alpha - Scalar(1)) * (Scalar(1) - rho) *
           pow(Scalar(1) + rho, -f.alpha - Scalar(1));
}

template <class Scalar, class Derived>
Scalar frac_laplacian_bubble(const BubbleFamilyT<Scalar>& f, const BubbleT<Scalar>& b,
                             const Eigen::MatrixBase<Derived>& x) {
    using std::pow;
    return pow(bubble_eval(f, b, x), f.p);
}

template <class Derived>
double superposition_eval(const BubbleCloud& c, const Eigen::MatrixBase<Derived>& x) {
    double w = 0.0;
    for (const auto& b : c.bubbles) w += bubble_eval(c.family, b, x);
    return w;
}

// W^p - sum_i U_i^p from the individual bubble values, without cancellation.
double superposition_excess(const std::vector<double>& u, double p);

double residual_lm_eval(const BubbleCloud& c, const KField& f,
                        const Eigen::Ref<const Eigen::VectorXd>& x);

template <class Phi>
double nonlinear_remainder_eval(const BubbleCloud& c, const KField& f, Phi&& phi,
                                const Eigen::Ref<const Eigen::VectorXd>& x) {
    double w = superposition_eval(c, x);
    double v = phi(x);
    double p = c.family.p;
    double K = k_eval(f, x / c.lambda);
    if (w + v <= 0.0) return K * (-std::pow(w, p) - p * std::pow(w, p - 1.0) * v);
    double u = v / w;
    return K * std::pow(w, p) * (std::expm1(p * std::log1p(u)) - p * u);
}

}  // namespace bubblekit
