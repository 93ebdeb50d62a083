#include <doctest.h>

#include <cmath>
#include <string>

#include "bubblekit/error.hpp"
#include "bubblekit/params.hpp"

using namespace bubblekit;

namespace {

ProblemParams base() {
    ProblemParams p;
    p.n = 3;
    p.s = 0.4;
    p.k = 1;
    p.beta = 2.5;
    p.tau = 1.05;
    p.m = 1;
    p.l = 2;
    p.a = Eigen::Vector3d(-1.0, -0.5, -0.5);
    p.delta0 = 0.05;
    return p;
}

std::string rejection(const ProblemParams& p) {
    try {
        validate_params(p);
    } catch (const InvalidParam& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_SUITE("params") {

TEST_CASE("default profile is accepted") {
    ProblemParams p = validate_params(base());
    CHECK(p.alpha == doctest::Approx(1.1));
    CHECK(p.p == doctest::Approx(3.8 / 2.2));
    CHECK(p.q == doctest::Approx(5.0 / 2.2));
    CHECK(p.bubble_count() == 2);
}

TEST_CASE("boundary k = (n-2s)/2 is rejected with the rule named") {
    ProblemParams p = base();
    p.s = 0.5;
    CHECK(rejection(p) == "k < (n-2s)/2 fails: 1 >= 1");
}

TEST_CASE("beta below n-2s is rejected") {
    ProblemParams p = base();
    p.n = 4;
    p.s = 0.5;
    p.beta = 2.0;
    p.tau = 1.2;
    p.a = Eigen::Vector4d(-1, -1, -1, -1);
    CHECK(rejection(p).rfind("beta > n-2s fails", 0) == 0);
}

TEST_CASE("each invariant is enforced") {
    auto bad = [](auto mutate) {
        ProblemParams p = base();
        mutate(p);
        return !rejection(p).empty();
    };
    CHECK(bad([](ProblemParams& p) { p.s = 0.0; }));
    CHECK(bad([](ProblemParams& p) { p.s = 1.0; }));
    CHECK(bad([](ProblemParams& p) { p.k = 0; }));
    CHECK(bad([](ProblemParams& p) { p.beta = 3.0; }));
    CHECK(bad([](ProblemParams& p) { p.tau = 1.0; }));
    CHECK(bad([](ProblemParams& p) { p.tau = 1.1; }));
    CHECK(bad([](ProblemParams& p) { p.a = Eigen::Vector3d(1.0, -0.5, -0.5); }));
    CHECK(bad([](ProblemParams& p) { p.a = Eigen::Vector3d(0.0, -0.5, -0.5); }));
    CHECK(bad([](ProblemParams& p) { p.a = Eigen::Vector2d(-1.0, -1.0); }));
    CHECK(bad([](ProblemParams& p) { p.m = 0; }));
    CHECK(bad([](ProblemParams& p) { p.l = 0; }));
    CHECK(bad([](ProblemParams& p) { p.delta0 = 0.0; }));
}

TEST_CASE("lambda from l") {
    ProblemParams p = validate_params(base());
    CHECK(derive_lambda(p) == doctest::Approx(161.269894386543765).epsilon(1e-13));
    p.l = 1;
    CHECK(derive_lambda(p) == 1.0);
}

TEST_CASE("lambda^beta = (lambda l)^{n-2s} and monotone in l") {
    ProblemParams p = validate_params(base());
    double prev = 0.0;
    for (int l = 1; l <= 12; ++l) {
        p.l = l;
        double lam = derive_lambda(p);
        CHECK(std::pow(lam, p.beta) / std::pow(lam * l, p.n - 2.0 * p.s) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(lam > prev - 1e-300);
        if (l > 1) CHECK(lam > prev);
        prev = lam;
    }
}

TEST_CASE("re-validation is the identity") {
    ProblemParams p = validate_params(base());
    ProblemParams q = validate_params(p);
    CHECK(q.alpha == p.alpha);
    CHECK(q.p == p.p);
    CHECK(q.q == p.q);
    CHECK(q.lambda_exponent == p.lambda_exponent);
    CHECK(q.a == p.a);
}

}
