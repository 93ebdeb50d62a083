#include "bubblekit/special.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "bubblekit/error.hpp"

namespace bubblekit {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_sum(double z) {
    double x = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (z + static_cast<double>(i));
    return x;
}

}  // namespace

double gamma_fn(double z) {
    using std::numbers::pi;
    if (z < 0.5) {
        double s = std::sin(pi * z);
        if (s == 0.0) throw DomainError("gamma_fn: pole at non-positive integer");
        return pi / (s * gamma_fn(1.0 - z));
    }
    z -= 1.0;
    double t = z + kLanczosG + 0.5;
    return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * lanczos_sum(z);
}

double lgamma_fn(double z) {
    using std::numbers::pi;
    if (z < 0.5) {
        double s = std::sin(pi * z);
        if (s == 0.0) throw DomainError("lgamma_fn: pole at non-positive integer");
        return std::log(pi / std::abs(s)) - lgamma_fn(1.0 - z);
    }
    z -= 1.0;
    double t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(lanczos_sum(z));
}

double sphere_area(int n) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / gamma_fn(0.5 * n);
}

double beta_radial_integral(int n, double q) {
    if (!(q > 0.5 * n)) throw DomainError("beta_radial_integral: q must exceed n/2");
    return std::pow(std::numbers::pi, 0.5 * n) * std::exp(lgamma_fn(q - 0.5 * n) - lgamma_fn(q));
}

double abs_moment_integral(int n, double b, double q) {
    if (!(b > -1.0) || !(q > 0.5 * (n + b))) throw DomainError("abs_moment_integral: divergent");
    return std::pow(std::numbers::pi, 0.5 * (n - 1)) *
           std::exp(lgamma_fn(0.5 * (b + 1.0)) + lgamma_fn(q - 0.5 * (n + b)) - lgamma_fn(q));
}

}  // namespace bubblekit
