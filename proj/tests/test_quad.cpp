#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <numbers>

#include "bubblekit/bubble.hpp"
#include "bubblekit/cache.hpp"
#include "bubblekit/error.hpp"
#include "bubblekit/quad.hpp"
#include "bubblekit/special.hpp"

using namespace bubblekit;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
    auto d = std::filesystem::temp_directory_path() / ("bubblekit_test_" + name);
    std::filesystem::remove_all(d);
    return d;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_SUITE("quad") {

TEST_CASE("radial profile against the Beta identity") {
    auto g = [](double r) { return std::pow(1.0 + r * r, -1.9); };
    QuadResult q = integrate_radial_profile(g, 3, 3.8, {1e-12, 1e-3, 400});
    CHECK(q.converged);
    CHECK(q.value == doctest::Approx(12.8424606896772732).epsilon(1e-10));
    CHECK(q.error_estimate >= 0.0);
    CHECK(std::isfinite(q.error_estimate));
    CHECK(q.nodes_used > 0);
}

TEST_CASE("radial profile of zero and of a Gaussian in one dimension") {
    QuadResult z = integrate_radial_profile([](double) { return 0.0; }, 3, 10.0);
    CHECK(z.value == 0.0);
    QuadResult g = integrate_radial_profile([](double r) { return std::exp(-r * r); }, 1, 50.0, {1e-12, 1e-3, 400});
    CHECK(g.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-11));
}

TEST_CASE("radial profile refuses slow decay") {
    CHECK_THROWS_AS(integrate_radial_profile([](double r) { return 1.0 / (1.0 + r * r); }, 3, 2.0), DomainError);
}

TEST_CASE("a larger panel budget never raises the error estimate") {
    auto f = [](double x) { return std::sqrt(std::abs(x - 0.3)) * std::cos(40.0 * x); };
    double prev = std::numeric_limits<double>::infinity();
    for (int panels : {2, 4, 8, 16, 32, 64, 128}) {
        QuadResult r = gk_adaptive(f, {0.0, 1.0}, {1e-14, 1e-3, panels});
        CHECK(r.error_estimate <= prev);
        prev = r.error_estimate;
    }
}

TEST_CASE("integrate_rn reproduces the bubble energy") {
    BubbleFamily f = make_family(3, 0.4);
    Bubble u{Eigen::Vector3d::Zero(), 1.0};
    const double e = 2.0 * 3 / (3 - 0.8);
    auto g = [&](const Eigen::VectorXd& y) { return std::pow(bubble_eval(f, u, y), e); };
    QuadResult q = integrate_rn(g, {Eigen::VectorXd(Eigen::Vector3d::Zero())}, 3, 6.0, cell_options(1e-10));
    const double closed = std::pow(f.C0, e) * std::pow(std::numbers::pi, 1.5) * gamma_fn(1.5) / gamma_fn(3.0);
    CHECK(closed == doctest::Approx(20.5618531909500981).epsilon(1e-13));
    CHECK(q.value == doctest::Approx(closed).epsilon(1e-8));
}

TEST_CASE("odd integrands vanish and integration is additive") {
    std::vector<Eigen::VectorXd> centers = {Eigen::VectorXd(Eigen::Vector3d(1.0, 0.5, 0.0))};
    auto odd = [&](const Eigen::VectorXd& y) {
        Eigen::VectorXd d = y - centers[0];
        return d[0] * std::pow(1.0 + d.squaredNorm(), -3.0);
    };
    auto even = [&](const Eigen::VectorXd& y) { return std::pow(1.0 + (y - centers[0]).squaredNorm(), -2.5); };
    auto other = [](const Eigen::VectorXd& y) {
        return std::exp(-0.5 * y.squaredNorm()) * (1.0 + 0.3 * y[1] * y[1]);
    };
    CellOptions opt = cell_options(1e-9);
    opt.throw_on_failure = false;
    QuadResult qo = integrate_rn(odd, centers, 3, 5.0, opt);
    CHECK(std::abs(qo.value) <= 1e-9 * qo.abs_integral + qo.error_estimate);

    std::vector<Eigen::VectorXd> both = {centers[0], Eigen::VectorXd(Eigen::Vector3d::Zero())};
    QuadResult qa = integrate_rn(even, both, 3, 5.0, cell_options(1e-9));
    QuadResult qb = integrate_rn(other, both, 3, 5.0, cell_options(1e-9));
    auto sum = [&](const Eigen::VectorXd& y) { return even(y) + other(y); };
    QuadResult qs = integrate_rn(sum, both, 3, 5.0, cell_options(1e-9));
    CHECK(std::abs(qs.value - qa.value - qb.value) <=
          qs.error_estimate + qa.error_estimate + qb.error_estimate + 1e-14);
    // Closed forms: pi^{3/2} Gamma(1)/Gamma(5/2) and (2 pi)^{3/2} (1 + 0.3).
    CHECK(qa.value == doctest::Approx(std::pow(std::numbers::pi, 1.5) / gamma_fn(2.5)).epsilon(1e-8));
    CHECK(qb.value == doctest::Approx(std::pow(2.0 * std::numbers::pi, 1.5) * 1.3).epsilon(1e-8));
}

TEST_CASE("integrate_rn refuses slow decay") {
    auto f = [](const Eigen::VectorXd& y) { return 1.0 / (1.0 + y.squaredNorm()); };
    CHECK_THROWS_AS(integrate_rn(f, {Eigen::VectorXd(Eigen::Vector3d::Zero())}, 3, 2.0, cell_options(1e-6)),
                    DomainError);
}

TEST_CASE("Riesz convolution far field") {
    const int n = 3;
    const double s = 0.4;
    auto run = [&](double D) {
        Eigen::VectorXd c = Eigen::Vector3d(D, 0.0, 0.0);
        auto bump = [&](const Eigen::VectorXd& z) {
            return std::pow(std::numbers::pi, -1.5) * std::exp(-(z - c).squaredNorm());
        };
        Eigen::VectorXd y = Eigen::Vector3d::Zero();
        QuadResult q = riesz_convolve(bump, y, n, s, 40.0, cell_options(1e-9), {c});
        return q.value * std::pow(D, n - 2.0 * s);
    };
    double e10 = std::abs(run(10.0) - 1.0), e100 = std::abs(run(100.0) - 1.0);
    CHECK(e100 < e10);
    CHECK(e100 < 1e-3);
    auto zero = [](const Eigen::VectorXd&) { return 0.0; };
    CellOptions opt = cell_options(1e-6);
    opt.throw_on_failure = false;
    CHECK(riesz_convolve(zero, Eigen::VectorXd(Eigen::Vector3d::Zero()), n, s, 10.0, opt).value == 0.0);
}

TEST_CASE("Riesz convolution against a closed form") {
    // Riesz potential of a Gaussian at its center: int |z|^{2s-n} e^{-|z|^2} = omega Gamma(s)/2.
    const int n = 3;
    const double s = 0.4;
    auto g = [](const Eigen::VectorXd& z) { return std::exp(-z.squaredNorm()); };
    QuadResult q = riesz_convolve(g, Eigen::VectorXd(Eigen::Vector3d::Zero()), n, s, 40.0, cell_options(1e-10));
    CHECK(q.value == doctest::Approx(sphere_area(3) * gamma_fn(s) / 2.0).epsilon(1e-8));
}

TEST_CASE("fractional Laplacian constant") {
    // s = 1/2 in three dimensions gives 1/pi^2.
    CHECK(fractional_laplacian_constant(3, 0.5) == doctest::Approx(1.0 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-13));
}

TEST_CASE("quadrature is reproducible bit for bit") {
    auto f = [](const Eigen::VectorXd& y) { return std::pow(1.0 + y.squaredNorm(), -2.5) * (1.0 + 0.1 * y[2]); };
    std::vector<Eigen::VectorXd> c = {Eigen::VectorXd(Eigen::Vector3d::Zero())};
    QuadResult a = integrate_rn(f, c, 3, 5.0, cell_options(1e-8));
    QuadResult b = integrate_rn(f, c, 3, 5.0, cell_options(1e-8));
    CHECK(same_bits(a.value, b.value));
    CHECK(same_bits(a.error_estimate, b.error_estimate));
    CHECK(a.nodes_used == b.nodes_used);
}

TEST_CASE("cache round trip is bit identical") {
    QuadCache cache(fresh_dir("cache"));
    CacheKey key("unit_test");
    key.add("x", 0.1).add("n", 3).add("label", std::string("a"));
    int calls = 0;
    auto fn = [&] {
        ++calls;
        return QuadResult{1.0 / 3.0, 1e-17 * M_PI, 12345, 0.7, true};
    };
    QuadResult a = cache.get_or_compute(key, fn);
    QuadResult b = cache.get_or_compute(key, fn);
    CHECK(calls == 1);
    CHECK(same_bits(a.value, b.value));
    CHECK(same_bits(a.error_estimate, b.error_estimate));
    CHECK(same_bits(a.abs_integral, b.abs_integral));
    CHECK(a.nodes_used == b.nodes_used);
    CHECK(b.converged);

    CacheKey other("unit_test");
    other.add("x", std::nextafter(0.1, 1.0)).add("n", 3).add("label", std::string("a"));
    CHECK(other.text() != key.text());
    CHECK_FALSE(cache.load_result(other).has_value());
}

TEST_CASE("hexadecimal doubles round trip") {
    for (double v : {0.0, -0.0, 1.0 / 3.0, 1e-300, -2.5e300, 5e-324})
        CHECK(same_bits(parse_hex_double(hex_double(v)), v));
}

TEST_CASE("disabled cache always computes") {
    QuadCache off;
    CHECK_FALSE(off.enabled());
    int calls = 0;
    auto fn = [&] {
        ++calls;
        return QuadResult{2.0, 0.0, 1, 2.0, true};
    };
    off.get_or_compute(CacheKey("x"), fn);
    off.get_or_compute(CacheKey("x"), fn);
    CHECK(calls == 2);
}

}
