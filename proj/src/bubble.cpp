#include "bubblekit/bubble.hpp"

#include <array>

#include "bubblekit/special.hpp"

namespace bubblekit {

double c0_constant(int n, double s) {
    double base = std::pow(2.0, 2.0 * s) * std::exp(lgamma_fn(0.5 * (n + 2.0 * s)) - lgamma_fn(0.5 * (n - 2.0 * s)));
    return std::pow(base, (n - 2.0 * s) / (4.0 * s));
}

BubbleFamily make_family(int n, double s) {
    BubbleFamily f;
    f.n = n;
    f.s = s;
    f.C0 = c0_constant(n, s);
    f.alpha = 0.5 * (n - 2.0 * s);
    f.p = (n + 2.0 * s) / (n - 2.0 * s);
    return f;
}

namespace {

double excess(const double* u, std::size_t count, double p) {
    if (count == 0) return 0.0;
    std::size_t top = 0;
    for (std::size_t i = 1; i < count; ++i)
        if (u[i] > u[top]) top = i;
    double lead = u[top];
    if (lead <= 0.0) return 0.0;
    double rest = 0.0, rest_p = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        if (i == top) continue;
        rest += u[i];
        rest_p += std::pow(u[i], p);
    }
    return std::pow(lead, p) * std::expm1(p * std::log1p(rest / lead)) - rest_p;
}

}  // namespace

double superposition_excess(const std::vector<double>& u, double p) { return excess(u.data(), u.size(), p); }

double residual_lm_eval(const BubbleCloud& c, const KField& f,
                        const Eigen::Ref<const Eigen::VectorXd>& x) {
    constexpr std::size_t kStack = 64;
    std::array<double, kStack> stack;
    std::vector<double> heap;
    const std::size_t N = c.bubbles.size();
    double* u = stack.data();
    if (N > kStack) {
        heap.resize(N);
        u = heap.data();
    }
    double w = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        u[i] = bubble_eval(c.family, c.bubbles[i], x);
        w += u[i];
    }
    double km1 = k_minus_one_scaled(f, x, 1.0 / c.lambda);
    double p = c.family.p;
    return km1 * std::pow(w, p) + excess(u, N, p);
}

}  // namespace bubblekit
