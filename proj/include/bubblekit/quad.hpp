#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "bubblekit/error.hpp"
#include "bubblekit/special.hpp"

namespace bubblekit {

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long nodes_used = 0;
    double abs_integral = 0.0;  // estimate of the integral of |f|
    bool converged = true;
};

// Integrand sample carrying the error of an inner integration.
struct Sample {
    double value = 0.0;
    double error = 0.0;
    double abs = 0.0;
    long nodes = 1;
};

struct QuadOptions {
    double tol = 1e-8;      // relative target
    double floor = 1e-3;    // fraction of the |f| integral used when the value cancels
    int max_panels = 200;
    double abs_tol = 0.0;   // absolute target; the looser of the two applies
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
Sample call(F& f, double x) {
    if constexpr (std::is_same_v<std::invoke_result_t<F&, double>, Sample>) {
        return f(x);
    } else {
        double v = f(x);
        return {v, 0.0, std::abs(v), 1};
    }
}

struct Panel {
    double a, b, value, err, abs, inner;
};

template <class F>
Panel gk15(F& f, double a, double b, long& nodes) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::array<double, 15> fv;
    double k = 0.0, g = 0.0, ab = 0.0, inner = 0.0;
    auto take = [&](int slot, double x, double wk) {
        Sample s = call(f, x);
        nodes += s.nodes;
        fv[slot] = s.value;
        k += wk * s.value;
        ab += wk * s.abs;
        inner += wk * s.error;
    };
    for (int i = 0; i < 7; ++i) {
        take(2 * i, c - h * kXgk[i], kWgk[i]);
        take(2 * i + 1, c + h * kXgk[i], kWgk[i]);
        if (i % 2 == 1) g += kWg[i / 2] * (fv[2 * i] + fv[2 * i + 1]);
    }
    take(14, c, kWgk[7]);
    g += kWg[3] * fv[14];
    // QUADPACK error scaling of |K - G| against the mean-deviation integral.
    const double mean = 0.5 * k;
    double asc = kWgk[7] * std::abs(fv[14] - mean);
    for (int i = 0; i < 7; ++i) asc += kWgk[i] * (std::abs(fv[2 * i] - mean) + std::abs(fv[2 * i + 1] - mean));
    const double ah = std::abs(h);
    asc *= ah;
    double err = std::abs((k - g) * h);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    const double resabs = ab * ah;
    const double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return {a, b, k * h, err + inner * ah, resabs, inner * ah};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod (7/15) on [bps.front(), bps.back()] with
// the interior breakpoints kept as panel edges. The returned state is the
// lowest-error snapshot seen, so a larger panel budget never raises the error.
template <class F>
QuadResult gk_adaptive(F&& f, const std::vector<double>& bps, const QuadOptions& opt) {
    std::vector<detail::Panel> panels;
    long nodes = 0;
    for (std::size_t i = 0; i + 1 < bps.size(); ++i)
        if (bps[i + 1] > bps[i]) panels.push_back(detail::gk15(f, bps[i], bps[i + 1], nodes));
    QuadResult best;
    best.error_estimate = std::numeric_limits<double>::infinity();
    best.converged = false;
    if (panels.empty()) {
        best.error_estimate = 0.0;
        best.converged = true;
        best.nodes_used = 1;
        return best;
    }
    for (;;) {
        double v = 0.0, e = 0.0, ab = 0.0, in = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            v += panels[i].value;
            e += panels[i].err;
            ab += panels[i].abs;
            in += panels[i].inner;
            if (panels[i].err - panels[i].inner > panels[worst].err - panels[worst].inner) worst = i;
        }
        double target = std::max(opt.abs_tol, opt.tol * std::max(std::abs(v), opt.floor * ab));
        if (e < best.error_estimate || !std::isfinite(best.error_estimate)) {
            best.value = v;
            best.error_estimate = e;
            best.abs_integral = ab;
        }
        best.nodes_used = nodes;
        if (e <= target) {
            best = {v, e, nodes, ab, true};
            return best;
        }
        // Bisection only reduces the rule error, not the error carried in
        // from inner integrations.
        if (in > target && e - in <= 0.1 * in) return best;
        const auto& w = panels[worst];
        double mid = 0.5 * (w.a + w.b);
        if (static_cast<int>(panels.size()) >= opt.max_panels || !(mid > w.a && mid < w.b) || !std::isfinite(e))
            return best;
        double a = w.a, b = w.b;
        panels[worst] = detail::gk15(f, a, mid, nodes);
        panels.push_back(detail::gk15(f, mid, b, nodes));
    }
}

inline Sample as_sample(const QuadResult& r) {
    return {r.value, r.error_estimate, r.abs_integral, r.nodes_used};
}

inline std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline void require_converged(const QuadResult& r, const char* what) {
    if (!r.converged)
        throw NoConvergence(std::string(what) + ": error estimate " + fmt_g(r.error_estimate) +
                            " above tolerance (value " + fmt_g(r.value) + ", |f| integral " +
                            fmt_g(r.abs_integral) + ")");
}

// Piecewise map of a half-line ray [r_start, rmax) onto a bounded variable:
// identity (or power map for an integrable r^e singularity) on [0, r0],
// logarithmic on [r0, R], and an algebraic compactification beyond R.
struct RayMap {
    double r0 = 1.0;
    double r_far = 64.0;
    double rmax = std::numeric_limits<double>::infinity();
    double near_exponent = 0.0;  // integrand ~ r^e as r -> 0, e > -1
    double tail_alpha = 1.0;     // integrand ~ r^{-1-2 tail_alpha} at infinity
    double r_start = 0.0;
};

template <class H>
QuadResult integrate_ray(H&& h, const RayMap& m, const QuadOptions& opt) {
    const bool inf = !std::isfinite(m.rmax);
    const bool has_near = m.r_start <= 0.0;
    const double rA = has_near ? std::min(m.r0, m.rmax) : m.r_start;
    const double rB = inf ? std::max(m.r_far, 2.0 * rA) : m.rmax;
    const bool has_log = rB > rA;
    const double logspan = has_log ? std::log(rB / rA) : 0.0;
    const double pw = m.near_exponent < 0.0 ? 1.0 / (m.near_exponent + 1.0) : 1.0;
    auto g = [&](double t) -> Sample {
        double r, jac;
        if (t < 1.0) {
            if (pw != 1.0) {
                double tp = std::pow(t, pw);
                r = rA * tp;
                jac = rA * pw * tp / t;
            } else {
                r = rA * t;
                jac = rA;
            }
        } else if (t < 2.0) {
            r = rA * std::exp((t - 1.0) * logspan);
            jac = r * logspan;
        } else {
            double u = 3.0 - t;
            double ia = 1.0 / m.tail_alpha;
            r = rB * std::pow(u, -ia);
            jac = ia * r / u;
        }
        Sample s = detail::call(h, r);
        s.value *= jac;
        s.error *= jac;
        s.abs *= jac;
        return s;
    };
    std::vector<double> bps;
    if (has_near) bps.push_back(0.0);
    bps.push_back(1.0);
    if (has_log) bps.push_back(2.0);
    if (inf) bps.push_back(3.0);
    return gk_adaptive(g, bps, opt);
}

// Orthonormal frame whose first column is `axis`.
Eigen::MatrixXd frame_from_axis(const Eigen::VectorXd& axis);

using SphereFn = std::function<Sample(const Eigen::VectorXd&)>;

// Integral over S^d, embedded in span(basis columns), of g(omega). Polar
// angles are adaptive; `levels` holds the options per nesting depth.
Sample sphere_integrate(int d, const Eigen::MatrixXd& basis, const SphereFn& g,
                        const std::vector<QuadOptions>& levels, std::size_t level, bool axisymmetric);

// omega_{n-1} * int_0^inf g(r) r^{n-1} dr.
QuadResult integrate_radial_profile(const std::function<double(double)>& g, int n, double q_decay,
                                    const QuadOptions& opt = {}, double scale = 1.0);

struct CellOptions {
    QuadOptions angular{1e-8, 1e-3, 400};  // polar angle
    QuadOptions azimuth{3e-9, 1e-3, 200};  // inner sphere levels
    QuadOptions radial{1e-9, 1e-3, 200};
    bool axisymmetric = false;
    bool throw_on_failure = true;
    Eigen::VectorXd axis;  // polar axis for cells that do not set their own
    // A coarse first pass sizes absolute targets for the inner levels, so
    // directions that carry little mass are not resolved to full relative
    // accuracy.
    bool pilot = true;
};

CellOptions cell_options(double tol);

struct Cell {
    Eigen::VectorXd center;
    Eigen::VectorXd axis;         // empty selects e_1
    double r0 = 1.0;              // inner length scale
    double near_exponent = -1.0;  // < -1 selects n-1 (regular integrand)
};

// Integral over R^n split into the Voronoi cells of the given centers, each
// integrated in polar coordinates about its center.
namespace detail {

template <class F>
QuadResult integrate_cells_pass(F& f, const std::vector<Cell>& cells, int n, double decay, const CellOptions& opt) {
    double spread = 0.0, rmax0 = 0.0;
    for (const auto& a : cells) {
        rmax0 = std::max(rmax0, a.r0);
        for (const auto& b : cells) spread = std::max(spread, (a.center - b.center).norm());
    }
    const double r_far = std::max(2.0 * spread, 64.0 * rmax0);
    std::vector<QuadOptions> levels;
    levels.push_back(opt.angular);
    for (int i = 1; i < n; ++i) levels.push_back(opt.azimuth);
    QuadResult total;
    total.nodes_used = 0;
    Eigen::VectorXd x(n);
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const Cell& cell = cells[ci];
        Eigen::VectorXd axis = cell.axis.size() == n  ? Eigen::VectorXd(cell.axis.normalized())
                               : opt.axis.size() == n ? Eigen::VectorXd(opt.axis.normalized())
                                                      : Eigen::VectorXd(Eigen::VectorXd::Unit(n, 0));
        Eigen::MatrixXd basis = frame_from_axis(axis);
        std::vector<Eigen::VectorXd> dvec;
        for (std::size_t cj = 0; cj < cells.size(); ++cj)
            if (cj != ci) dvec.push_back(cells[cj].center - cell.center);
        RayMap map;
        map.r0 = cell.r0;
        map.r_far = r_far;
        map.near_exponent = cell.near_exponent < -1.0 ? n - 1.0 : cell.near_exponent;
        map.tail_alpha = 0.5 * (decay - n);
        auto dir = [&](const Eigen::VectorXd& w) -> Sample {
            double rho = std::numeric_limits<double>::infinity();
            for (const auto& d : dvec) {
                double wd = w.dot(d);
                if (wd > 0.0) rho = std::min(rho, 0.5 * d.squaredNorm() / wd);
            }
            RayMap mm = map;
            mm.rmax = rho;
            auto h = [&](double r) -> double {
                x.noalias() = cell.center + r * w;
                return std::pow(r, n - 1) * f(x);
            };
            return as_sample(integrate_ray(h, mm, opt.radial));
        };
        Sample s = sphere_integrate(n - 1, basis, dir, levels, 0, opt.axisymmetric);
        total.value += s.value;
        total.error_estimate += s.error;
        total.abs_integral += s.abs;
        total.nodes_used += s.nodes;
    }
    return total;
}

}  // namespace detail

// Integral over R^n split into the Voronoi cells of the given centers, each
// integrated in polar coordinates about its center.
template <class F>
QuadResult integrate_cells(F&& f, const std::vector<Cell>& cells, int n, double decay, const CellOptions& opt) {
    if (!(decay > n)) throw DomainError("integrate_rn: decay must exceed the dimension");
    CellOptions run = opt;
    long pilot_nodes = 0;
    if (opt.pilot && opt.angular.tol < 1e-3) {
        CellOptions coarse = opt;
        coarse.angular = {1e-2, 0.1, 40, 0.0};
        coarse.azimuth = {1e-2, 0.1, 24, 0.0};
        coarse.radial = {1e-3, 0.1, 40, 0.0};
        QuadResult p = detail::integrate_cells_pass(f, cells, n, decay, coarse);
        pilot_nodes = p.nodes_used;
        const double target = opt.angular.tol * std::max(std::abs(p.value), opt.angular.floor * p.abs_integral);
        const double m = static_cast<double>(cells.size());
        run.angular.abs_tol = std::max(run.angular.abs_tol, 0.5 * target / m);
        run.azimuth.abs_tol = std::max(run.azimuth.abs_tol, 0.2 * target / (m * std::numbers::pi));
        run.radial.abs_tol = std::max(run.radial.abs_tol, 0.1 * target / (m * sphere_area(n)));
    }
    QuadResult total = detail::integrate_cells_pass(f, cells, n, decay, run);
    total.nodes_used += pilot_nodes;
    double target = opt.angular.tol * std::max(std::abs(total.value), opt.angular.floor * total.abs_integral);
    total.converged = total.error_estimate <= target;
    if (opt.throw_on_failure) require_converged(total, "integrate_rn");
    return total;
}

template <class F>
QuadResult integrate_rn(F&& f, const std::vector<Eigen::VectorXd>& centers, int n, double decay,
                        const CellOptions& opt, double r0 = 1.0) {
    std::vector<Cell> cells;
    for (const auto& c : centers) cells.push_back({c, {}, r0, -2.0});
    return integrate_cells(f, cells, n, decay, opt);
}

// int |y - z|^{2s-n} f(z) dz. `features` are points where f concentrates;
// f_decay is the algebraic decay rate of f.
template <class F>
QuadResult riesz_convolve(F&& f, const Eigen::VectorXd& y, int n, double s, double f_decay,
                          const CellOptions& opt, const std::vector<Eigen::VectorXd>& features = {},
                          double r0 = 1.0) {
    std::vector<Cell> cells;
    Eigen::VectorXd toward = features.empty() ? Eigen::VectorXd::Unit(n, 0) : Eigen::VectorXd(features[0] - y);
    if (toward.norm() == 0.0) toward = Eigen::VectorXd::Unit(n, 0);
    cells.push_back({y, toward, r0, 2.0 * s - 1.0});
    for (const auto& c : features) {
        if ((c - y).norm() == 0.0) continue;
        cells.push_back({c, Eigen::VectorXd(y - c), r0, -2.0});
    }
    auto g = [&](const Eigen::VectorXd& z) { return std::pow((z - y).norm(), 2.0 * s - n) * f(z); };
    return integrate_cells(g, cells, n, f_decay + n - 2.0 * s, opt);
}

// (-Delta)^s u at x from the spherical-mean form of the principal value
// integral. When u is radial about `symmetry_center` the spherical means are
// taken with the axisymmetric reduction.
QuadResult fractional_laplacian_pv(const std::function<double(const Eigen::VectorXd&)>& u,
                                   const Eigen::VectorXd& x, int n, double s, double u_decay,
                                   const QuadOptions& opt,
                                   const std::optional<Eigen::VectorXd>& symmetry_center = std::nullopt);

double fractional_laplacian_constant(int n, double s);

}  // namespace bubblekit
