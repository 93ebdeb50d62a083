#include "bubblekit/constants.hpp"

#include "bubblekit/bubble.hpp"

namespace bubblekit {

QuadResult abs_moment_split(int n, double b, double q, double tol) {
    QuadOptions inner{tol * 1e-2, 1e-3, 400};
    QuadOptions outer{tol, 1e-3, 400};
    long nodes = 0;
    auto slice = [&](double t) {
        if (n == 1) return std::pow(t, b) * std::pow(1.0 + t * t, -q);
        double a2 = 1.0 + t * t;
        auto g = [&](double r) { return std::pow(a2 + r * r, -q); };
        QuadResult r = integrate_radial_profile(g, n - 1, 2.0 * q, inner, std::sqrt(a2));
        nodes += r.nodes_used;
        return std::pow(t, b) * r.value;
    };
    QuadResult r = integrate_radial_profile(slice, 1, 2.0 * q - (n - 1) - b, outer);
    r.nodes_used += nodes;
    return r;
}

QuadResult abs_moment_direct(int n, double b, double q, double tol) {
    auto f = [&](const Eigen::VectorXd& x) { return std::pow(std::abs(x[0]), b) * std::pow(1.0 + x.squaredNorm(), -q); };
    CellOptions opt = cell_options(tol);
    return integrate_rn(f, {Eigen::VectorXd::Zero(n)}, n, 2.0 * q - b, opt);
}

Constants compute_constants(const ProblemParams& p, double tol, const QuadCache& cache) {
    Constants c;
    const int n = p.n;
    const double ns = n - 2.0 * p.s;
    c.C0 = c0_constant(n, p.s);
    const double lead = std::pow(c.C0, 2.0 * n / ns);

    CacheKey kb("base_integral");
    kb.add("n", n).add("s", p.s).add("tol", tol);
    c.base_integral = cache.get_or_compute(kb, [&] {
        auto g = [&](double r) { return std::pow(1.0 + r * r, -0.5 * (n + 2.0 * p.s)); };
        return integrate_radial_profile(g, n, n + 2.0 * p.s, QuadOptions{tol, 1e-3, 400});
    });
    require_converged(c.base_integral, "base integral");

    auto moment = [&](double q) {
        CacheKey k("abs_moment_split");
        k.add("n", n).add("beta", p.beta).add("q", q).add("tol", tol);
        QuadResult r = cache.get_or_compute(k, [&] { return abs_moment_split(n, p.beta, q, tol); });
        require_converged(r, "moment integral");
        return r;
    };
    c.moment_n = moment(n);
    c.moment_n1 = moment(n + 1.0);

    c.c0 = lead * c.base_integral.value;
    c.c2 = 0.5 * ns * c.c0;
    c.c1 = ns * p.beta * lead * (-p.a.sum()) / (2.0 * n) * c.moment_n.value;
    c.c3 = ns * lead * p.beta * c.moment_n1.value;
    return c;
}

}  // namespace bubblekit
