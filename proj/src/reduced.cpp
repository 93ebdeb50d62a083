#include "bubblekit/reduced.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bubblekit/error.hpp"
#include "bubblekit/quad.hpp"
#include "bubblekit/sampling.hpp"

namespace bubblekit {

Eigen::VectorXd ReducedState::scales(const ProblemParams& p) const {
    return d.array().pow(-1.0 / p.alpha).matrix();
}

double F_value(const Eigen::VectorXd& z, const Eigen::MatrixXd& A, double c1, double c2, const ProblemParams& p) {
    return 0.5 * c2 * z.dot(A * z) - (c1 / p.q) * z.array().pow(p.q).sum();
}

Eigen::VectorXd F_gradient(const Eigen::VectorXd& z, const Eigen::MatrixXd& A, double c1, double c2,
                           const ProblemParams& p) {
    return c2 * (A * z) - c1 * z.array().pow(p.q - 1.0).matrix();
}

Eigen::MatrixXd F_hessian(const Eigen::VectorXd& z, const Eigen::MatrixXd& A, double c1, double c2,
                          const ProblemParams& p) {
    Eigen::MatrixXd H = c2 * A;
    H.diagonal() -= c1 * (p.q - 1.0) * z.array().pow(p.q - 2.0).matrix();
    return H;
}

double two_point_maximizer(double c1, double c2, const ProblemParams& p) {
    return std::pow(c2 / c1, 1.0 / (p.q - 2.0));
}

Eigen::VectorXd maximize_F(const Eigen::MatrixXd& A, double c1, double c2, const ProblemParams& p,
                           const MaximizeOptions& opt) {
    const Eigen::Index N = A.rows();
    if (N == 1) throw DomainError("maximize_F: a single bubble has no interaction and F has no interior maximum");
    const double maxrow = A.rowwise().sum().maxCoeff();
    Eigen::VectorXd w = Eigen::VectorXd::Constant(N, std::log(c2 * maxrow / c1) / (p.q - 2.0));
    const double eps = std::numeric_limits<double>::epsilon();
    auto F_of = [&](const Eigen::VectorXd& ww) { return F_value(ww.array().exp().matrix(), A, c1, c2, p); };
    Eigen::VectorXd z = w.array().exp();
    double best_res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt.max_iter; ++it) {
        z = w.array().exp();
        Eigen::VectorXd g = F_gradient(z, A, c1, c2, p);
        const double scale = c1 * z.array().pow(p.q - 1.0).maxCoeff();
        const double res = g.lpNorm<Eigen::Infinity>();
        best_res = std::min(best_res, res);
        if (res <= std::max(opt.tol, 64.0 * eps * scale)) break;
        Eigen::VectorXd gw = z.cwiseProduct(g);
        Eigen::MatrixXd Hw = z.asDiagonal() * F_hessian(z, A, c1, c2, p) * z.asDiagonal();
        Hw.diagonal() += gw;
        Eigen::VectorXd step = Hw.ldlt().solve(-gw);
        if (!step.allFinite() || step.dot(gw) <= 0.0) step = gw / (c1 * (p.q - 1.0) * z.array().pow(p.q).maxCoeff());
        // Backtracking on F; a full Newton step is taken near the maximum.
        const double f0 = F_of(w);
        double t = 1.0;
        while (t > 1e-12 && F_of(w + t * step) < f0 + 1e-4 * t * step.dot(gw) &&
               (t * step).lpNorm<Eigen::Infinity>() > 1e-14)
            t *= 0.5;
        w += t * step;
        if (it + 1 == opt.max_iter) {
            std::ostringstream msg;
            msg << "maximize_F: gradient " << best_res << " above tolerance after " << opt.max_iter << " iterations";
            throw NoConvergence(msg.str());
        }
    }
    z = w.array().exp();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(F_hessian(z, A, c1, c2, p));
    const double hscale = c1 * (p.q - 1.0) * z.array().pow(p.q - 2.0).maxCoeff();
    if (es.eigenvalues().maxCoeff() > 1e-9 * hscale)
        throw NoConvergence("maximize_F: stationary point is not a maximum");
    return z;
}

ClaimBounds claim_bounds(const Eigen::MatrixXd& A, double c1, double c2, const ProblemParams& p) {
    Eigen::VectorXd rows = A.rowwise().sum();
    return {std::pow(c2 * rows.minCoeff() / c1, 1.0 / (p.q - 2.0)),
            std::pow(c2 * rows.maxCoeff() / c1, 1.0 / (p.q - 2.0))};
}

ScaleBox scale_box(const Eigen::VectorXd& b, const ProblemParams& p) {
    ScaleBox box;
    box.C1 = std::pow(b.maxCoeff(), -1.0 / p.alpha) - p.delta0;
    box.C2 = std::pow(b.minCoeff(), -1.0 / p.alpha) + p.delta0;
    if (!(box.C1 > 0.0)) {
        std::ostringstream msg;
        msg << "scale_box: C1 = " << box.C1 << " <= 0; choose delta0 below " << box.C1 + p.delta0;
        throw BoxError(msg.str());
    }
    return box;
}

double hessian_gap(const Eigen::VectorXd& b, const Eigen::MatrixXd& A, double c1, double c2, const ProblemParams& p) {
    Eigen::MatrixXd H = F_hessian(b, A, c1, c2, p);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(H);
    lu.setThreshold(1e-13);
    if (!lu.isInvertible()) throw SingularHessian("hessian_gap: D^2F(b) is singular");
    Eigen::MatrixXd inv = lu.inverse();
    return 1.0 / inv.cwiseAbs().rowwise().sum().maxCoeff();
}

double hessian_gap_sampled(const Eigen::MatrixXd& H, int samples, std::mt19937_64& rng) {
    const Eigen::Index N = H.rows();
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x(N);
    for (int t = 0; t < samples; ++t) {
        for (Eigen::Index i = 0; i < N; ++i) x[i] = uniform(rng, -1.0, 1.0);
        Eigen::Index pin = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(N));
        x[pin] = (rng() & 1) ? 1.0 : -1.0;
        best = std::min(best, (H * x).lpNorm<Eigen::Infinity>() / x.lpNorm<Eigen::Infinity>());
    }
    return best;
}

Eigen::VectorXd pi_remainder(const Eigen::VectorXd& b, const Eigen::VectorXd& theta, double c1,
                             const ProblemParams& p) {
    const double e = p.q - 1.0;
    Eigen::VectorXd out(b.size());
    for (Eigen::Index i = 0; i < b.size(); ++i) {
        const double t = theta[i] / b[i];
        if (!(t > -1.0)) throw DomainError("pi_remainder: b + theta must stay positive");
        double r;
        if (std::abs(t) < 1e-3) {
            // Binomial series from the quadratic term on.
            double coef = e * (e - 1.0) / 2.0, tk = t * t;
            r = 0.0;
            for (int k = 2; k < 12; ++k) {
                r += coef * tk;
                coef *= (e - k) / (k + 1.0);
                tk *= t;
            }
        } else {
            r = std::expm1(e * std::log1p(t)) - e * t;
        }
        out[i] = c1 * std::pow(b[i], e) * r;
    }
    return out;
}

Eigen::VectorXd pi_remainder_quadrature(const Eigen::VectorXd& b, const Eigen::VectorXd& theta, double c1,
                                        const ProblemParams& p, double tol) {
    Eigen::VectorXd out(b.size());
    const double q = p.q;
    for (Eigen::Index i = 0; i < b.size(); ++i) {
        const double bi = b[i], ti = theta[i];
        auto f = [&](double s) {
            return c1 * (q - 1.0) * (q - 2.0) * std::pow(bi + s * ti, q - 3.0) * ti * ti * (1.0 - s);
        };
        QuadResult r = gk_adaptive(f, {0.0, 1.0}, {tol, 1e-3, 200, 0.0});
        out[i] = r.value;
    }
    return out;
}

RemainderModel zero_remainder(int n, int N) {
    return [n, N](const Eigen::MatrixXd&, const Eigen::VectorXd&) {
        return RemainderTerms{Eigen::MatrixXd::Zero(n, N), Eigen::MatrixXd::Zero(n, N), Eigen::VectorXd::Zero(N),
                              Eigen::VectorXd::Zero(N)};
    };
}

RemainderModel constant_remainder(const LatticeConfig& lat, double xi, double c_lambda) {
    const int n = lat.params.n;
    const Eigen::Index N = lat.size();
    Eigen::MatrixXd pattern(n, N);
    for (Eigen::Index i = 0; i < N; ++i) {
        double sign = (lat.integer.col(i).sum() % 2 == 0) ? 1.0 : -1.0;
        pattern.col(i).setConstant(sign / std::sqrt(static_cast<double>(n)));
    }
    RemainderTerms t{xi * pattern, c_lambda * pattern, Eigen::VectorXd::Constant(N, xi),
                     Eigen::VectorXd::Constant(N, c_lambda)};
    return [t](const Eigen::MatrixXd&, const Eigen::VectorXd&) { return t; };
}

RemainderModel measured_remainder(const Eigen::MatrixXd& center_excess, const Eigen::VectorXd& scale_excess,
                                  const Eigen::VectorXd& scales, const Constants& c, const ProblemParams& p) {
    const Eigen::Index n = center_excess.rows(), N = center_excess.cols();
    RemainderTerms t{Eigen::MatrixXd::Zero(n, N), Eigen::MatrixXd(n, N), Eigen::VectorXd::Zero(N),
                     Eigen::VectorXd(N)};
    for (Eigen::Index i = 0; i < N; ++i) {
        const double L = scales[i];
        for (Eigen::Index j = 0; j < n; ++j)
            t.theta1(j, i) = std::pow(L, p.beta - 2.0) * center_excess(j, i) / (c.c3 * p.a[j]);
        t.theta2[i] = -std::pow(L, p.alpha + 1.0) * scale_excess[i];
    }
    return [t](const Eigen::MatrixXd&, const Eigen::VectorXd&) { return t; };
}

double default_c_lambda(double lambda) { return 1e-2 * std::pow(lambda, -0.1); }

namespace {

double max_column_norm(const Eigen::MatrixXd& m) {
    return m.cols() == 0 ? 0.0 : m.colwise().norm().maxCoeff();
}

}  // namespace

FixedPointResult fixed_point_solve(const LatticeConfig& lat, const Constants& c, const ProblemParams& p,
                                   const Eigen::VectorXd& b, const RemainderModel& model,
                                   const FixedPointOptions& opt) {
    const Eigen::MatrixXd A = interaction_matrix(lat);
    const Eigen::MatrixXd H = F_hessian(b, A, c.c1, c.c2, p);
    FixedPointResult out;
    out.C4 = hessian_gap(b, A, c.c1, c.c2, p);
    out.c_lambda = opt.c_lambda > 0.0 ? opt.c_lambda : default_c_lambda(lat.lambda);
    out.offset_radius = 2.0 * out.c_lambda;
    out.theta_radius = 3.0 * out.c_lambda / out.C4;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(H);
    const double e = std::min(2.0, p.beta - 1.0);
    const Eigen::Index N = lat.size();

    auto G = [&](const Eigen::MatrixXd& off, const Eigen::VectorXd& th, Eigen::MatrixXd& off_new,
                 Eigen::VectorXd& th_new) {
        RemainderTerms t = model(off, th);
        const double r = max_column_norm(off);
        off_new = r * r * t.xi1 + t.theta1;
        th_new = lu.solve(std::pow(r, e) * t.xi2 + t.theta2 + pi_remainder(b, th, c.c1, p));
    };
    auto check_box = [&](const Eigen::MatrixXd& off, const Eigen::VectorXd& th, int iter) {
        for (Eigen::Index i = 0; i < N; ++i) {
            double r = off.col(i).norm();
            if (!(r <= out.offset_radius)) {
                std::ostringstream msg;
                msg << "fixed_point_solve: iterate " << iter << " left the box: |P^" << i << " - X^" << i
                    << "| = " << r << " > " << out.offset_radius << "; increase l";
                throw BoxEscape(msg.str());
            }
            if (!(std::abs(th[i]) <= out.theta_radius)) {
                std::ostringstream msg;
                msg << "fixed_point_solve: iterate " << iter << " left the box: |theta_" << i << "| = "
                    << std::abs(th[i]) << " > " << out.theta_radius << "; increase l";
                throw BoxEscape(msg.str());
            }
        }
    };

    Eigen::MatrixXd off = Eigen::MatrixXd::Zero(p.n, N), off_new;
    Eigen::VectorXd th = Eigen::VectorXd::Zero(N), th_new;
    bool done = false;
    for (int it = 1; it <= opt.max_iter && !done; ++it) {
        G(off, th, off_new, th_new);
        check_box(off_new, th_new, it);
        double diff = std::max((off_new - off).lpNorm<Eigen::Infinity>(), (th_new - th).lpNorm<Eigen::Infinity>());
        off = off_new;
        th = th_new;
        out.trace.push_back({it, diff, max_column_norm(off), th.lpNorm<Eigen::Infinity>()});
        out.iterations = it;
        done = diff <= opt.tol;
    }
    G(off, th, off_new, th_new);
    out.residual = std::max((off_new - off).lpNorm<Eigen::Infinity>(), (th_new - th).lpNorm<Eigen::Infinity>());
    if (!done || !(out.residual <= opt.tol)) {
        std::ostringstream msg;
        msg << "fixed_point_solve: residual " << out.residual << " above " << opt.tol << " after "
            << out.iterations << " iterations";
        throw NoConvergence(msg.str());
    }
    out.state.b = b;
    out.state.theta = th;
    out.state.d = b + th;
    out.state.offsets = off;
    return out;
}

AsymptoticGradient reduced_gradient_asymptotic(const Eigen::MatrixXd& offsets, const Eigen::VectorXd& scales,
                                               const Constants& c, const LatticeConfig& lat,
                                               const ProblemParams& p) {
    const Eigen::Index N = lat.size();
    const double lb = std::pow(lat.lambda, -p.beta);
    const double e = p.n - 2.0 * p.s;
    AsymptoticGradient g;
    g.center.resize(p.n, N);
    g.scale.resize(N);
    g.self_term.resize(N);
    g.interaction_term.resize(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        const double L = scales[i];
        for (int j = 0; j < p.n; ++j) g.center(j, i) = -c.c3 * p.a[j] * std::pow(L, 2.0 - p.beta) * lb * offsets(j, i);
        g.self_term[i] = -c.c1 * std::pow(L, -p.beta - 1.0) * lb;
        double acc = 0.0;
        for (Eigen::Index h = 0; h < N; ++h) {
            if (h == i) continue;
            acc += c.c2 / L * std::pow(L * scales[h], -p.alpha) *
                   std::pow((lat.centers.col(i) - lat.centers.col(h)).norm(), -e);
        }
        g.interaction_term[i] = acc;
        g.scale[i] = g.self_term[i] + acc;
    }
    return g;
}

}  // namespace bubblekit
