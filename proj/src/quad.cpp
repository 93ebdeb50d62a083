#include "bubblekit/quad.hpp"

namespace bubblekit {

Eigen::MatrixXd frame_from_axis(const Eigen::VectorXd& axis) {
    const Eigen::Index n = axis.size();
    Eigen::MatrixXd B(n, n);
    B.col(0) = axis.normalized();
    Eigen::Index filled = 1;
    for (Eigen::Index j = 0; j < n && filled < n; ++j) {
        Eigen::VectorXd v = Eigen::VectorXd::Unit(n, j);
        for (Eigen::Index c = 0; c < filled; ++c) v -= B.col(c).dot(v) * B.col(c);
        if (v.norm() < 1e-8) continue;
        B.col(filled++) = v.normalized();
    }
    return B;
}

Sample sphere_integrate(int d, const Eigen::MatrixXd& basis, const SphereFn& g,
                        const std::vector<QuadOptions>& levels, std::size_t level, bool axisymmetric) {
    constexpr double pi = std::numbers::pi;
    const QuadOptions& opt = levels[std::min(level, levels.size() - 1)];
    const Eigen::VectorXd b0 = basis.col(0);
    if (d == 0) {
        Sample a = g(b0);
        Sample b = g(-b0);
        return {a.value + b.value, a.error + b.error, a.abs + b.abs, a.nodes + b.nodes};
    }
    Eigen::VectorXd w(b0.size());
    if (d == 1) {
        const Eigen::VectorXd b1 = basis.col(1);
        auto f = [&](double phi) -> Sample {
            w.noalias() = std::cos(phi) * b0 + std::sin(phi) * b1;
            return g(w);
        };
        return as_sample(gk_adaptive(f, {0.0, 0.5 * pi, pi, 1.5 * pi, 2.0 * pi}, opt));
    }
    const Eigen::MatrixXd sub = basis.rightCols(d);
    const double inner_area = sphere_area(d);
    auto f = [&](double theta) -> Sample {
        const double c = std::cos(theta), sn = std::sin(theta);
        const double wgt = std::pow(sn, d - 1);
        Sample s;
        if (axisymmetric) {
            w.noalias() = c * b0 + sn * sub.col(0);
            s = g(w);
            s.value *= inner_area;
            s.error *= inner_area;
            s.abs *= inner_area;
        } else {
            Eigen::VectorXd wi(b0.size());
            SphereFn inner = [&](const Eigen::VectorXd& om) {
                wi.noalias() = c * b0 + sn * om;
                return g(wi);
            };
            s = sphere_integrate(d - 1, sub, inner, levels, level + 1, false);
        }
        s.value *= wgt;
        s.error *= wgt;
        s.abs *= wgt;
        return s;
    };
    return as_sample(gk_adaptive(f, {0.0, 0.5 * pi, pi}, opt));
}

QuadResult integrate_radial_profile(const std::function<double(double)>& g, int n, double q_decay,
                                    const QuadOptions& opt, double scale) {
    if (!(q_decay > n)) throw DomainError("integrate_radial_profile: decay must exceed the dimension");
    RayMap m;
    m.r0 = scale;
    m.r_far = 64.0 * scale;
    m.tail_alpha = 0.5 * (q_decay - n);
    auto h = [&](double r) { return std::pow(r, n - 1) * g(r); };
    QuadResult r = integrate_ray(h, m, opt);
    const double w = sphere_area(n);
    r.value *= w;
    r.error_estimate *= w;
    r.abs_integral *= w;
    return r;
}

CellOptions cell_options(double tol) {
    CellOptions o;
    o.angular.tol = tol;
    o.azimuth.tol = tol / 3.0;
    o.radial.tol = tol / 10.0;
    return o;
}

double fractional_laplacian_constant(int n, double s) {
    return s * std::pow(4.0, s) * std::exp(lgamma_fn(0.5 * n + s) - lgamma_fn(1.0 - s)) /
           std::pow(std::numbers::pi, 0.5 * n);
}

QuadResult fractional_laplacian_pv(const std::function<double(const Eigen::VectorXd&)>& u,
                                   const Eigen::VectorXd& x, int n, double s, double u_decay,
                                   const QuadOptions& opt,
                                   const std::optional<Eigen::VectorXd>& symmetry_center) {
    const double area = sphere_area(n);
    const double ux = u(x);
    Eigen::VectorXd axis = Eigen::VectorXd::Unit(n, 0);
    double offset = x.norm();
    if (symmetry_center) {
        Eigen::VectorXd d = *symmetry_center - x;
        offset = d.norm();
        if (offset > 0.0) axis = d / offset;
    }
    const Eigen::MatrixXd basis = frame_from_axis(axis);
    std::vector<QuadOptions> levels(static_cast<std::size_t>(n), QuadOptions{opt.tol * 1e-2, opt.floor, opt.max_panels});
    long nodes = 0;
    auto mean = [&](double r) {
        Eigen::VectorXd y(n);
        auto g = [&](const Eigen::VectorXd& w) -> Sample {
            y.noalias() = x + r * w;
            double v = u(y);
            return {v, 0.0, std::abs(v), 1};
        };
        Sample sm = sphere_integrate(n - 1, basis, g, levels, 0, symmetry_center.has_value());
        nodes += sm.nodes;
        return sm.value / area;
    };
    const double r_min = 1e-3;
    const double R = 8.0 * (offset + 1.0);
    double c = (ux - mean(r_min)) / (r_min * r_min);
    double near = c * std::pow(r_min, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
    RayMap m;
    m.r_start = r_min;
    m.r0 = r_min;
    m.r_far = R;
    m.tail_alpha = 0.5 * (2.0 * s + u_decay);
    auto h = [&](double r) {
        double mr = mean(r);
        double k = std::pow(r, -1.0 - 2.0 * s);
        return r < R ? k * (ux - mr) : -k * mr;
    };
    QuadResult main = integrate_ray(h, m, opt);
    const double scale = fractional_laplacian_constant(n, s) * area;
    QuadResult out;
    out.value = scale * (near + main.value + ux * std::pow(R, -2.0 * s) / (2.0 * s));
    out.error_estimate = scale * (main.error_estimate + std::abs(near) * r_min * r_min);
    out.abs_integral = scale * main.abs_integral;
    out.nodes_used = main.nodes_used + nodes;
    out.converged = main.converged;
    return out;
}

}  // namespace bubblekit
