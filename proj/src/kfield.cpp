#include "bubblekit/kfield.hpp"

#include <cmath>
#include "bubblekit/error.hpp"
#include "bubblekit/sampling.hpp"

namespace bubblekit {

namespace {

double cutoff(const KField& f, double u) {
    if (u <= f.cutoff_inner) return 1.0;
    if (u >= f.cutoff_outer) return 0.0;
    double v = (u - f.cutoff_inner) / (f.cutoff_outer - f.cutoff_inner);
    return std::exp(1.0 - 1.0 / (1.0 - v * v));
}

double dcutoff(const KField& f, double u) {
    if (u <= f.cutoff_inner || u >= f.cutoff_outer) return 0.0;
    double w = f.cutoff_outer - f.cutoff_inner;
    double v = (u - f.cutoff_inner) / w;
    double d = 1.0 - v * v;
    return std::exp(1.0 - 1.0 / d) * (-2.0 * v / (d * d)) / w;
}

double profile(const KField& f, double u) { return std::pow(u, f.params.beta) * cutoff(f, u); }

double max_profile(const KField& f) {
    // Coarse scan then golden-section refinement on the bracketing cell.
    const int N = 4000;
    double h = f.cutoff_outer / N;
    int best = 0;
    double bv = 0.0;
    for (int i = 0; i <= N; ++i) {
        double v = profile(f, i * h);
        if (v > bv) { bv = v; best = i; }
    }
    double lo = std::max(0.0, (best - 1) * h), hi = std::min(f.cutoff_outer, (best + 1) * h);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80; ++it) {
        double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        if (profile(f, x1) < profile(f, x2)) lo = x1; else hi = x2;
    }
    return std::max(bv, profile(f, 0.5 * (lo + hi)));
}

}  // namespace

KField make_kfield(const ProblemParams& p, const KFieldOptions& opt) {
    KField f;
    f.params = p;
    f.unit = opt.unit;
    f.cutoff_inner = opt.cutoff_inner;
    f.cutoff_outer = opt.cutoff_outer;
    if (!(0.0 < f.cutoff_inner && f.cutoff_inner < f.cutoff_outer && f.cutoff_outer <= 0.5))
        throw ConstructionError("cutoff radii must satisfy 0 < r_a < r_b <= 1/2");
    if (f.unit) return f;

    f.psi_max = max_profile(f);
    double neg_p = 0.0, pos_p = 0.0, neg_np = 0.0, pos_np = 0.0;
    for (int i = 0; i < p.n; ++i) {
        double ai = p.a[i];
        if (i < p.k) (ai < 0 ? neg_p : pos_p) += std::abs(ai);
        else (ai < 0 ? neg_np : pos_np) += std::abs(ai);
    }
    double core = 1.0 - f.psi_max * neg_p;
    if (!(core > 0.0))
        throw ConstructionError("inf K <= 0: periodic coefficients too negative (1 - psi_max * sum|a_i^-| = " +
                                std::to_string(core) + ")");
    f.saturation = opt.saturation > 0.0 ? opt.saturation : std::max(1.0, 2.0 * neg_np / core);
    f.k_min = core - neg_np / f.saturation;
    f.k_max = 1.0 + f.psi_max * pos_p + pos_np / f.saturation;
    if (!(f.k_min > 0.0))
        throw ConstructionError("inf K <= 0: K_min = " + std::to_string(f.k_min));
    return f;
}

double kfield_psi(const KField& f, double t) {
    return profile(f, std::abs(std::remainder(t, 1.0)));
}

double kfield_dpsi(const KField& f, double t) {
    double r = std::remainder(t, 1.0);
    double u = std::abs(r);
    if (u == 0.0) return 0.0;
    double b = f.params.beta;
    double d = b * std::pow(u, b - 1.0) * cutoff(f, u) + std::pow(u, b) * dcutoff(f, u);
    return r < 0 ? -d : d;
}

double kfield_phi(const KField& f, double t) {
    double v = std::pow(std::abs(t), f.params.beta);
    return v / (1.0 + f.saturation * v);
}

double kfield_dphi(const KField& f, double t) {
    double u = std::abs(t);
    if (u == 0.0) return 0.0;
    double b = f.params.beta;
    double v = std::pow(u, b);
    double den = 1.0 + f.saturation * v;
    double d = b * std::pow(u, b - 1.0) / (den * den);
    return t < 0 ? -d : d;
}

double k_minus_one(const KField& f, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (f.unit) return 0.0;
    const auto& p = f.params;
    double acc = 0.0;
    for (int i = 0; i < p.n; ++i)
        acc += p.a[i] * (i < p.k ? kfield_psi(f, x[i]) : kfield_phi(f, x[i]));
    return acc;
}

double k_minus_one_scaled(const KField& f, const Eigen::Ref<const Eigen::VectorXd>& x, double scale) {
    if (f.unit) return 0.0;
    const auto& p = f.params;
    double acc = 0.0;
    for (int i = 0; i < p.n; ++i) {
        double t = x[i] * scale;
        acc += p.a[i] * (i < p.k ? kfield_psi(f, t) : kfield_phi(f, t));
    }
    return acc;
}

double k_eval(const KField& f, const Eigen::Ref<const Eigen::VectorXd>& x) {
    return 1.0 + k_minus_one(f, x);
}

Eigen::VectorXd k_grad(const KField& f, const Eigen::Ref<const Eigen::VectorXd>& x) {
    const auto& p = f.params;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
    if (f.unit) return g;
    for (int i = 0; i < p.n; ++i)
        g[i] = p.a[i] * (i < p.k ? kfield_dpsi(f, x[i]) : kfield_dphi(f, x[i]));
    return g;
}

std::vector<RemainderRow> k_remainder_order(const KField& f, const std::vector<double>& radii,
                                            int directions) {
    const auto& p = f.params;
    std::vector<Eigen::VectorXd> dirs;
    for (int i = 0; i < p.n; ++i) {
        dirs.push_back(Eigen::VectorXd::Unit(p.n, i));
        dirs.push_back(-Eigen::VectorXd::Unit(p.n, i));
    }
    std::mt19937_64 rng(20240917ULL);
    while (static_cast<int>(dirs.size()) < directions) dirs.push_back(random_direction(rng, p.n));
    std::vector<RemainderRow> out;
    for (double r : radii) {
        double sup = 0.0;
        for (const auto& w : dirs) {
            Eigen::VectorXd y = r * w;
            double lead = 0.0;
            for (int i = 0; i < p.n; ++i) lead += p.a[i] * std::pow(std::abs(y[i]), p.beta);
            sup = std::max(sup, std::abs(k_minus_one(f, y) - lead));
        }
        out.push_back({r, sup / std::pow(r, p.beta)});
    }
    return out;
}

}  // namespace bubblekit
