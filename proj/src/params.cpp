#include "bubblekit/params.hpp"

#include <cmath>
#include <sstream>

#include "bubblekit/error.hpp"

namespace bubblekit {

namespace {

template <class T>
std::string fmt(T v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void require(bool ok, const std::string& rule) {
    if (!ok) throw InvalidParam(rule);
}

}  // namespace

int ProblemParams::bubble_count() const {
    int c = 1;
    for (int i = 0; i < k; ++i) c *= (m + 1);
    return c;
}

ProblemParams default_params() {
    ProblemParams p;
    p.a = Eigen::Vector3d(-1.0, -0.5, -0.5);
    return validate_params(p);
}

ProblemParams validate_params(const ProblemParams& in) {
    ProblemParams p = in;
    double ns = p.n - 2.0 * p.s;
    require(p.s > 0.0 && p.s < 1.0, "0 < s < 1 fails: s = " + fmt(p.s));
    require(p.k >= 1, "k >= 1 fails: k = " + fmt(p.k));
    require(p.k < 0.5 * ns, "k < (n-2s)/2 fails: " + fmt(p.k) + " >= " + fmt(0.5 * ns));
    require(p.n > 2.0 * p.s + 2.0, "n > 2s+2 fails: " + fmt(p.n) + " <= " + fmt(2.0 * p.s + 2.0));
    require(p.beta > ns, "beta > n-2s fails: " + fmt(p.beta) + " <= " + fmt(ns));
    require(p.beta < p.n, "beta < n fails: " + fmt(p.beta) + " >= " + fmt(p.n));
    require(p.tau > p.k, "tau > k fails: " + fmt(p.tau) + " <= " + fmt(p.k));
    require(p.tau < 0.5 * ns, "tau < (n-2s)/2 fails: " + fmt(p.tau) + " >= " + fmt(0.5 * ns));
    require(p.a.size() == p.n, "a has length n fails: " + fmt(p.a.size()) + " != " + fmt(p.n));
    for (Eigen::Index i = 0; i < p.a.size(); ++i)
        require(p.a[i] != 0.0, "a_i != 0 fails at i = " + fmt(i + 1));
    require(p.a.sum() < 0.0, "sum a_i < 0 fails: " + fmt(p.a.sum()));
    require(p.m >= 1, "m >= 1 fails: m = " + fmt(p.m));
    require(p.l >= 1, "l >= 1 fails: l = " + fmt(p.l));
    require(p.delta0 > 0.0, "delta0 > 0 fails: " + fmt(p.delta0));
    p.alpha = 0.5 * ns;
    p.p = (p.n + 2.0 * p.s) / ns;
    p.q = 2.0 * p.beta / ns;
    p.lambda_exponent = ns / (p.beta - ns);
    return p;
}

double derive_lambda(const ProblemParams& p) {
    return std::pow(static_cast<double>(p.l), p.lambda_exponent);
}

}  // namespace bubblekit
