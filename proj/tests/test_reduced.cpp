#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "bubblekit/error.hpp"
#include "bubblekit/lattice.hpp"
#include "bubblekit/reduced.hpp"
#include "bubblekit/sampling.hpp"
#include "test_support.hpp"

using namespace bubblekit;
using testing_support::profile;

namespace {

// High-precision reference values for the default profile.
const double kC1 = 79.9668420379568574;
const double kC2 = 117.723571741457124;
const double kC3 = 19.9917105094892143;
const double kB = 4.12885321062183812;
const double kC4 = 32.1064286567610339;

Constants frozen() {
    Constants c;
    c.C0 = 2.17587988150106094;
    c.c0 = 107.021428855870113;
    c.c1 = kC1;
    c.c2 = kC2;
    c.c3 = kC3;
    return c;
}

LatticeConfig lattice(int m, int l = 2) {
    ProblemParams p = profile(m, l);
    return build_centers(p, derive_lambda(p));
}

// Reverses the center order.
LatticeConfig reversed(const LatticeConfig& in) {
    LatticeConfig out = in;
    const Eigen::Index N = in.size();
    for (Eigen::Index i = 0; i < N; ++i) {
        out.centers.col(i) = in.centers.col(N - 1 - i);
        out.integer.col(i) = in.integer.col(N - 1 - i);
    }
    return out;
}

}  // namespace

TEST_SUITE("reduced") {

TEST_CASE("F on the two-point lattice") {
    ProblemParams p = profile();
    Eigen::MatrixXd A = interaction_matrix(lattice(1));
    for (double t : {0.5, 1.0, 3.0}) {
        Eigen::Vector2d z(t, t);
        double expect = kC2 * t * t - (p.n - 2 * p.s) * kC1 / p.beta * std::pow(t, p.q);
        CHECK(F_value(z, A, kC1, kC2, p) == doctest::Approx(expect).epsilon(1e-14));
    }
    CHECK(std::abs(F_value(Eigen::Vector2d(1e-9, 1e-9), A, kC1, kC2, p)) < 1e-14);
    CHECK(F_value(Eigen::Vector2d(0.7, 2.0), A, kC1, kC2, p) ==
          doctest::Approx(F_value(Eigen::Vector2d(2.0, 0.7), A, kC1, kC2, p)).epsilon(1e-15));
}

TEST_CASE("gradient and Hessian match central differences") {
    ProblemParams p = profile(2);
    Eigen::MatrixXd A = interaction_matrix(lattice(2));
    std::mt19937_64 rng(17);
    for (int t = 0; t < 20; ++t) {
        Eigen::Vector3d z(uniform(rng, 0.5, 5), uniform(rng, 0.5, 5), uniform(rng, 0.5, 5));
        Eigen::VectorXd g = F_gradient(z, A, kC1, kC2, p);
        Eigen::MatrixXd H = F_hessian(z, A, kC1, kC2, p);
        CHECK((H - H.transpose()).norm() == 0.0);
        const double h = 1e-5;
        for (int i = 0; i < 3; ++i) {
            Eigen::Vector3d zp = z, zm = z;
            zp[i] += h;
            zm[i] -= h;
            double fd = (F_value(zp, A, kC1, kC2, p) - F_value(zm, A, kC1, kC2, p)) / (2 * h);
            CHECK(g[i] == doctest::Approx(fd).epsilon(1e-6).scale(1e-3));
            Eigen::VectorXd gd = (F_gradient(zp, A, kC1, kC2, p) - F_gradient(zm, A, kC1, kC2, p)) / (2 * h);
            for (int j = 0; j < 3; ++j) CHECK(H(j, i) == doctest::Approx(gd[j]).epsilon(1e-6).scale(1e-3));
        }
    }
}

TEST_CASE("two-point maximizer matches the closed form") {
    ProblemParams p = profile();
    Eigen::MatrixXd A = interaction_matrix(lattice(1));
    Eigen::VectorXd b = maximize_F(A, kC1, kC2, p);
    const double closed = std::pow(kC2 / kC1, (p.n - 2 * p.s) / (2 * p.beta - 2 * (p.n - 2 * p.s)));
    CHECK(closed == doctest::Approx(kB).epsilon(1e-13));
    CHECK(two_point_maximizer(kC1, kC2, p) == doctest::Approx(closed).epsilon(1e-14));
    for (int i = 0; i < 2; ++i) CHECK(b[i] == doctest::Approx(closed).epsilon(1e-8));
    CHECK(F_gradient(b, A, kC1, kC2, p).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("maximizer on three centers: stationarity, concavity, claim bounds, equivariance") {
    ProblemParams p = profile(2);
    LatticeConfig lat = lattice(2);
    Eigen::MatrixXd A = interaction_matrix(lat);
    Eigen::VectorXd b = maximize_F(A, kC1, kC2, p);
    CHECK((b.array() > 0).all());
    CHECK(F_gradient(b, A, kC1, kC2, p).lpNorm<Eigen::Infinity>() <= 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(F_hessian(b, A, kC1, kC2, p));
    CHECK(es.eigenvalues().maxCoeff() < 0.0);
    ClaimBounds cb = claim_bounds(A, kC1, kC2, p);
    CHECK(cb.lower <= cb.upper);
    for (Eigen::Index i = 0; i < b.size(); ++i) {
        CHECK(b[i] >= cb.lower * (1 - 1e-12));
        CHECK(b[i] <= cb.upper * (1 + 1e-12));
    }
    // The middle center has two neighbours and the larger b.
    CHECK(b[1] > b[0]);
    CHECK(b[0] == doctest::Approx(b[2]).epsilon(1e-12));
    Eigen::VectorXd br = maximize_F(interaction_matrix(reversed(lat)), kC1, kC2, p);
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(br[i] == doctest::Approx(b[2 - i]).epsilon(1e-12));
    // Small perturbations lower F.
    std::mt19937_64 rng(23);
    double F0 = F_value(b, A, kC1, kC2, p);
    for (int t = 0; t < 50; ++t) {
        Eigen::Vector3d d(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
        CHECK(F_value(Eigen::VectorXd(b + 1e-3 * d), A, kC1, kC2, p) < F0);
    }
}

TEST_CASE("single bubble has no interior maximum") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(1, 1);
    CHECK_THROWS_AS(maximize_F(A, kC1, kC2, profile()), DomainError);
}

TEST_CASE("scale box") {
    ProblemParams p = profile();
    const double t = 2.0;
    ScaleBox box = scale_box(Eigen::Vector2d(t, t), p);
    CHECK(box.C1 == doctest::Approx(std::pow(t, -2.0 / 2.2) - p.delta0).epsilon(1e-14));
    CHECK(box.C2 == doctest::Approx(std::pow(t, -2.0 / 2.2) + p.delta0).epsilon(1e-14));
    CHECK(box.C1 < box.C2);
    ScaleBox bb = scale_box(Eigen::Vector2d(kB, kB), p);
    CHECK(bb.C1 == doctest::Approx(0.275521219322796327 - 0.05).epsilon(1e-13));
    p.delta0 = 0.5;
    try {
        scale_box(Eigen::Vector2d(kB, kB), p);
        FAIL("expected BoxError");
    } catch (const BoxError& e) {
        CHECK(std::string(e.what()).find("delta0") != std::string::npos);
    }
}

TEST_CASE("Hessian gap") {
    ProblemParams p = profile();
    Eigen::MatrixXd A = interaction_matrix(lattice(1));
    Eigen::Vector2d b(kB, kB);
    const double C4 = hessian_gap(b, A, kC1, kC2, p);
    const double gamma = kC1 * (p.q - 1) * std::pow(kB, p.q - 2);
    CHECK(gamma == doctest::Approx((p.q - 1) * kC2).epsilon(1e-13));
    CHECK(C4 == doctest::Approx(gamma - kC2).epsilon(1e-12));
    CHECK(C4 == doctest::Approx(kC4).epsilon(1e-12));
    std::mt19937_64 rng(29);
    CHECK(hessian_gap_sampled(F_hessian(b, A, kC1, kC2, p), 1000, rng) >= C4 - 1e-12);
    CHECK(hessian_gap(b, A, 2 * kC1, 2 * kC2, p) == doctest::Approx(2 * C4).epsilon(1e-13));

    LatticeConfig lat = lattice(2);
    Eigen::MatrixXd A3 = interaction_matrix(lat);
    Eigen::VectorXd b3 = maximize_F(A3, kC1, kC2, profile(2));
    double C43 = hessian_gap(b3, A3, kC1, kC2, profile(2));
    CHECK(C43 > 0.0);
    CHECK(hessian_gap_sampled(F_hessian(b3, A3, kC1, kC2, profile(2)), 1000, rng) >= C43 - 1e-12);
}

TEST_CASE("singular Hessian is reported") {
    ProblemParams p = profile();
    Eigen::MatrixXd A = interaction_matrix(lattice(1));
    // gamma = c2 makes [[-gamma, c2], [c2, -gamma]] singular.
    const double t = std::pow(kC2 / (kC1 * (p.q - 1)), 1.0 / (p.q - 2));
    CHECK_THROWS_AS(hessian_gap(Eigen::Vector2d(t, t), A, kC1, kC2, p), SingularHessian);
}

TEST_CASE("Taylor remainder closed form against quadrature") {
    ProblemParams p = profile();
    std::mt19937_64 rng(31);
    for (int t = 0; t < 20; ++t) {
        Eigen::Vector2d b(uniform(rng, 1, 6), uniform(rng, 1, 6));
        double scale = t < 10 ? 0.5 : 1e-4;
        Eigen::Vector2d th(uniform(rng, -scale, scale) * b[0], uniform(rng, -scale, scale) * b[1]);
        Eigen::VectorXd a = pi_remainder(b, th, kC1, p);
        Eigen::VectorXd q = pi_remainder_quadrature(b, th, kC1, p);
        for (int i = 0; i < 2; ++i) CHECK(a[i] == doctest::Approx(q[i]).epsilon(1e-10));
    }
    CHECK(pi_remainder(Eigen::Vector2d(kB, kB), Eigen::Vector2d::Zero(), kC1, p).norm() == 0.0);
}

TEST_CASE("zero remainder model returns the lattice and b in one step") {
    ProblemParams p = profile();
    LatticeConfig lat = lattice(1);
    Eigen::Vector2d b(kB, kB);
    FixedPointResult r = fixed_point_solve(lat, frozen(), p, b, zero_remainder(p.n, 2));
    CHECK(r.iterations == 1);
    CHECK(r.state.offsets.norm() == 0.0);
    CHECK(r.state.theta.norm() == 0.0);
    CHECK(r.state.d == b);
    CHECK(r.residual == 0.0);
    Eigen::VectorXd L = r.state.scales(p);
    CHECK(L[0] == doctest::Approx(0.275521219322796327).epsilon(1e-13));
}

TEST_CASE("symmetric model on two bubbles gives mirrored offsets and equal theta") {
    ProblemParams p = profile();
    LatticeConfig lat = lattice(1);
    Eigen::Vector2d b(kB, kB);
    const double cl = default_c_lambda(lat.lambda);
    CHECK(cl == doctest::Approx(1e-2 * std::pow(lat.lambda, -0.1)));
    FixedPointResult r = fixed_point_solve(lat, frozen(), p, b, constant_remainder(lat, 1.0, cl));
    CHECK(r.residual <= 1e-10);
    CHECK(r.C4 == doctest::Approx(kC4).epsilon(1e-12));
    CHECK((r.state.offsets.col(0) + r.state.offsets.col(1)).norm() <= 1e-15);
    CHECK(r.state.offsets.col(0).norm() > 0.0);
    CHECK(r.state.theta[0] == r.state.theta[1]);
    for (const auto& row : r.trace) {
        CHECK(row.offset_max <= r.offset_radius);
        CHECK(row.theta_max <= r.theta_radius);
    }
    // Contraction after the first step.
    for (std::size_t k = 2; k < r.trace.size(); ++k)
        if (r.trace[k - 1].residual > 0) CHECK(r.trace[k].residual < r.trace[k - 1].residual);
    ScaleBox box = scale_box(b, p);
    Eigen::VectorXd L = r.state.scales(p);
    for (Eigen::Index i = 0; i < L.size(); ++i) {
        CHECK(L[i] >= box.C1);
        CHECK(L[i] <= box.C2);
    }
}

TEST_CASE("fixed point is permutation equivariant") {
    ProblemParams p = profile(2);
    LatticeConfig lat = lattice(2);
    LatticeConfig rev = reversed(lat);
    Constants c = frozen();
    Eigen::VectorXd b = maximize_F(interaction_matrix(lat), kC1, kC2, p);
    Eigen::VectorXd br = maximize_F(interaction_matrix(rev), kC1, kC2, p);
    const double cl = default_c_lambda(lat.lambda);
    FixedPointResult r = fixed_point_solve(lat, c, p, b, constant_remainder(lat, 1.0, cl));
    FixedPointResult rr = fixed_point_solve(rev, c, p, br, constant_remainder(rev, 1.0, cl));
    for (Eigen::Index i = 0; i < 3; ++i) {
        CHECK((r.state.offsets.col(i) - rr.state.offsets.col(2 - i)).norm() <= 1e-14);
        CHECK(r.state.theta[i] == doctest::Approx(rr.state.theta[2 - i]).epsilon(1e-9).scale(1e-14));
    }
}

TEST_CASE("an oversized remainder escapes the box") {
    ProblemParams p = profile();
    LatticeConfig lat = lattice(1);
    const double cl = default_c_lambda(lat.lambda);
    try {
        fixed_point_solve(lat, frozen(), p, Eigen::Vector2d(kB, kB), constant_remainder(lat, 10.0 / cl, cl));
        FAIL("expected BoxEscape");
    } catch (const BoxEscape& e) {
        CHECK(std::string(e.what()).find("increase l") != std::string::npos);
    }
}

TEST_CASE("asymptotic gradient terms") {
    ProblemParams p = profile();
    LatticeConfig lat = lattice(1);
    Constants c = frozen();
    const double Lb = std::pow(kB, -1.0 / p.alpha);
    Eigen::Vector2d scales(Lb, Lb);
    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 2);
    AsymptoticGradient g = reduced_gradient_asymptotic(zero, scales, c, lat, p);
    CHECK(g.center.norm() == 0.0);
    // At b the two scale terms cancel.
    for (int i = 0; i < 2; ++i) {
        CHECK(g.self_term[i] < 0.0);
        CHECK(g.interaction_term[i] > 0.0);
        CHECK(std::abs(g.scale[i]) <= 1e-12 * std::abs(g.self_term[i]));
    }
    Eigen::MatrixXd off = zero;
    off(0, 0) = 0.1;
    off(1, 1) = -0.1;
    AsymptoticGradient h = reduced_gradient_asymptotic(off, scales, c, lat, p);
    const double lb = std::pow(lat.lambda, -p.beta);
    CHECK(h.center(0, 0) > 0.0);  // a_1 < 0, offset > 0
    CHECK(h.center(1, 1) < 0.0);
    CHECK(h.center(0, 0) == doctest::Approx(-kC3 * p.a[0] * std::pow(Lb, 2 - p.beta) * lb * 0.1).epsilon(1e-14));
}

TEST_CASE("measured model reproduces a target gradient discrepancy") {
    // At offset theta1 the leading center term cancels the supplied excess.
    ProblemParams p = profile();
    Constants c = frozen();
    Eigen::MatrixXd excess(3, 2);
    excess << 0.1, -0.1, 0.02, 0.02, -0.03, -0.03;
    Eigen::Vector2d sexcess(0.5, 0.5), scales(0.3, 0.3);
    RemainderTerms t = measured_remainder(excess, sexcess, scales, c, p)(Eigen::MatrixXd::Zero(3, 2),
                                                                         Eigen::VectorXd::Zero(2));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(-c.c3 * p.a[j] * std::pow(scales[i], 2 - p.beta) * t.theta1(j, i) ==
                  doctest::Approx(-excess(j, i)).epsilon(1e-14));
    CHECK(t.xi1.norm() == 0.0);
    CHECK(t.xi2.norm() == 0.0);
}

}
