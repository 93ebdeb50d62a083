#include <doctest.h>

#include <cmath>
#include <random>

#include "bubblekit/error.hpp"
#include "bubblekit/sampling.hpp"
#include "bubblekit/verify.hpp"
#include "test_support.hpp"

using namespace bubblekit;
using testing_support::profile;

namespace {

Constants frozen() {
    Constants c;
    c.C0 = 2.17587988150106094;
    c.c0 = 107.021428855870113;
    c.c1 = 79.9668420379568574;
    c.c2 = 117.723571741457124;
    c.c3 = 19.9917105094892143;
    return c;
}

BubbleCloud single(const ProblemParams& p, double scale) {
    BubbleCloud c;
    c.family = make_family(p.n, p.s);
    c.bubbles.push_back({Eigen::VectorXd::Zero(p.n), scale});
    c.lambda = derive_lambda(p);
    return c;
}

LemmaOptions small_lemmas() {
    LemmaOptions o;
    o.a1_trials = 2000;
    o.a2_samples = 100;
    o.a3_samples = 400;
    return o;
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("rate fit") {
    std::vector<double> xs = {1, 2, 4, 8}, ys;
    for (double x : xs) ys.push_back(3.0 * std::pow(x, -0.85));
    RateFit f = fit_rate(xs, ys);
    CHECK(f.slope == doctest::Approx(-0.85).epsilon(1e-13));
    CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK_THROWS_AS(fit_rate({1, 2}, {1, 2}), DomainError);
    CHECK_THROWS_AS(fit_rate({1, 3, 2}, {1, 2, 3}), DomainError);
    CHECK_THROWS_AS(fit_rate({1, 2, 3}, {1, 0, 3}), DomainError);
}

TEST_CASE("significant decrease") {
    CHECK(significant_decrease({3, 2, 1}, {0.1, 0.1, 0.1}));
    CHECK_FALSE(significant_decrease({3, 2.9, 1}, {0.1, 0.1, 0.1}));
    CHECK(significant_decrease({-3, 2, -1}, {0, 0, 0}));
    CHECK_FALSE(significant_decrease({1, 2}, {0, 0}));
}

TEST_CASE("interaction kernel") {
    ProblemParams p = profile();
    Eigen::VectorXd P = Eigen::Vector3d::Zero(), Q = Eigen::Vector3d(7.0, 0.0, 0.0);
    const double L = 1.3;
    CHECK(epsilon_ih(L, L, P, Q, p) == doctest::Approx(std::pow(2.0 + L * L * 49.0, -1.1)).epsilon(1e-14));
    for (double D : {1e2, 1e4, 1e6}) {
        Eigen::VectorXd R = Eigen::Vector3d(0.0, D, 0.0);
        double v = epsilon_ih(0.7, 1.9, P, R, p) * std::pow(0.7 * 1.9, 1.1) * std::pow(D, 2.2);
        CHECK(v == doctest::Approx(1.0).epsilon(2.0 / (D * D)));
    }
    std::mt19937_64 rng(37);
    for (int t = 0; t < 20; ++t) {
        double Li = uniform(rng, 0.3, 3), Lh = uniform(rng, 0.3, 3);
        Eigen::VectorXd R = Eigen::Vector3d(uniform(rng, -5, 5), uniform(rng, -5, 5), uniform(rng, -5, 5));
        const double h = 1e-5;
        double fd = (epsilon_ih(Li + h, Lh, P, R, p) - epsilon_ih(Li - h, Lh, P, R, p)) / (2 * h);
        CHECK(std::abs(depsilon_ih(Li, Lh, P, R, p) - fd) <= 1e-8 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("single bubble with K = 1 has zero scale gradient") {
    ProblemParams p = profile();
    KFieldOptions unit;
    unit.unit = true;
    KField f = make_kfield(p, unit);
    QuadResult r = numeric_grad_scale(single(p, 1.0), f, 0, cell_options(1e-8));
    CHECK(std::abs(r.value) <= r.error_estimate + 1e-14);
}

TEST_CASE("transverse center gradient vanishes at a lattice point") {
    ProblemParams p = profile();
    KField f = make_kfield(p);
    // A relative target cannot be met by a value that cancels exactly, so the
    // check is against the absolute error estimate.
    CellOptions opt = cell_options(1e-6);
    opt.throw_on_failure = false;
    QuadResult r = numeric_grad_center(single(p, 1.0), f, 0, 1, opt);
    CHECK(std::abs(r.value) <= r.error_estimate);
    CHECK(r.error_estimate <= 1e-6 * r.abs_integral);
}

TEST_CASE("single-bubble scale gradient approaches the self term") {
    Constants c = frozen();
    std::vector<double> errs;
    for (int l : {2, 4}) {
        ProblemParams p = profile(1, l);
        KField f = make_kfield(p);
        BubbleCloud cl = single(p, 1.0);
        QuadResult r = numeric_grad_scale(cl, f, 0, cell_options(1e-6));
        double lead = -c.c1 * std::pow(cl.lambda, -p.beta);
        CHECK(r.value < 0.0);
        errs.push_back(std::abs(r.value / lead - 1.0));
    }
    CHECK(errs[1] < errs[0]);
    CHECK(errs[1] < 0.1);
}

TEST_CASE("residual norms vanish in the K = 1 control") {
    ProblemParams p = profile();
    KFieldOptions unit;
    unit.unit = true;
    ResidualStudy s = residual_decay_study(p, {2, 3, 4}, frozen(), unit);
    REQUIRE(s.rows.size() == 3);
    for (const auto& r : s.rows) {
        CHECK(r.norm == 0.0);
        CHECK(r.control_norm == 0.0);
    }
    CHECK(s.predicted_exponent == doctest::Approx(-0.85).epsilon(1e-14));
}

TEST_CASE("predicted residual exponent is monotone in tau") {
    ProblemParams p = profile();
    ProblemParams q = p;
    q.tau = 1.08;
    q = validate_params(q);
    KFieldOptions unit;
    unit.unit = true;
    double ep = residual_decay_study(p, {2, 3, 4}, frozen(), unit).predicted_exponent;
    double eq = residual_decay_study(q, {2, 3, 4}, frozen(), unit).predicted_exponent;
    CHECK(eq > ep);
}

TEST_CASE("lemma suite is seed deterministic") {
    ProblemParams p = profile();
    LemmaReport a = lemma_suite(p, 99, small_lemmas());
    LemmaReport b = lemma_suite(p, 99, small_lemmas());
    CHECK(a.a1.max_ratio == b.a1.max_ratio);
    CHECK(a.a1.failures == b.a1.failures);
    REQUIRE(a.a2.size() == b.a2.size());
    for (std::size_t i = 0; i < a.a2.size(); ++i) CHECK(a.a2[i].final_max == b.a2[i].final_max);
    REQUIRE(a.a3.size() == b.a3.size());
    for (std::size_t i = 0; i < a.a3.size(); ++i) CHECK(a.a3[i].C_rep == b.a3[i].C_rep);
}

TEST_CASE("pointwise product inequality has no counterexample") {
    LemmaReport r = lemma_suite(profile(), 5, small_lemmas());
    CHECK(r.a1.trials == 2000);
    CHECK(r.a1.failures == 0);
    CHECK(r.a1.max_ratio <= 1.0);
    CHECK(r.a1_pass);
    for (const auto& row : r.a3) CHECK(row.inner_min >= 1.0);
    bool log_endpoint = false;
    for (const auto& row : r.a2)
        if (!row.asserted) log_endpoint = true;
    CHECK(log_endpoint);
}

TEST_CASE("require_pass names the failing lemma") {
    LemmaReport r;
    r.a1_pass = true;
    r.a2_pass = true;
    r.a3_pass = false;
    try {
        require_pass(r);
        FAIL("expected SuiteFailure");
    } catch (const SuiteFailure& e) {
        CHECK(std::string(e.what()).find("sandwich") != std::string::npos);
    }
}

}
