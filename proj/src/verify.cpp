#include "bubblekit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "bubblekit/error.hpp"
#include "bubblekit/reduced.hpp"
#include "bubblekit/sampling.hpp"

namespace bubblekit {

RateFit fit_rate(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 3) throw DomainError("fit_rate: needs at least three (x, y) pairs");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw DomainError("fit_rate: values must be positive");
        if (i > 0 && !(xs[i] > xs[i - 1])) throw DomainError("fit_rate: xs must be strictly increasing");
    }
    const double m = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += std::log(xs[i]);
        sy += std::log(ys[i]);
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dx = std::log(xs[i]) - mx, dy = std::log(ys[i]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    RateFit f;
    f.xs = xs;
    f.ys = ys;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

namespace {

std::vector<Cell> bubble_cells(const BubbleCloud& cloud, const Eigen::VectorXd& axis) {
    std::vector<Cell> cells;
    for (const auto& b : cloud.bubbles) cells.push_back({b.center, axis, 1.0 / b.scale, -2.0});
    return cells;
}

}  // namespace

QuadResult numeric_grad_scale(const BubbleCloud& cloud, const KField& f, int i, const CellOptions& opt) {
    const int n = cloud.family.n;
    const Bubble& bi = cloud.bubbles.at(static_cast<std::size_t>(i));
    auto g = [&](const Eigen::VectorXd& x) {
        return -residual_lm_eval(cloud, f, x) * bubble_grad_scale(cloud.family, bi, x);
    };
    return integrate_cells(g, bubble_cells(cloud, {}), n, 2.0 * n, opt);
}

QuadResult numeric_grad_center(const BubbleCloud& cloud, const KField& f, int i, int j, const CellOptions& opt) {
    const int n = cloud.family.n;
    const Bubble& bi = cloud.bubbles.at(static_cast<std::size_t>(i));
    auto g = [&](const Eigen::VectorXd& x) {
        return -residual_lm_eval(cloud, f, x) * bubble_grad_center(cloud.family, bi, j, x);
    };
    // With the polar axis along e_j the odd factor does not cancel inside
    // the azimuthal integrals.
    return integrate_cells(g, bubble_cells(cloud, Eigen::VectorXd::Unit(n, j)), n, 2.0 * n, opt);
}

BubbleCloud cloud_at(const LatticeConfig& lat, const Eigen::VectorXd& scales) {
    BubbleCloud c;
    c.family = make_family(lat.params.n, lat.params.s);
    c.lambda = lat.lambda;
    for (Eigen::Index i = 0; i < lat.size(); ++i) c.bubbles.push_back({lat.centers.col(i), scales[i]});
    return c;
}

CacheKey& add_problem(CacheKey& key, const KField& f) {
    const ProblemParams& p = f.params;
    key.add("n", p.n).add("s", p.s).add("k", p.k).add("beta", p.beta).add("tau", p.tau);
    key.add("m", p.m).add("l", p.l).add("delta0", p.delta0);
    for (Eigen::Index i = 0; i < p.a.size(); ++i) key.add("a", p.a[i]);
    key.add("cutoff_inner", f.cutoff_inner).add("cutoff_outer", f.cutoff_outer);
    key.add("saturation", f.saturation).add("unit", f.unit ? 1 : 0);
    return key;
}

CacheKey& add_cloud(CacheKey& key, const BubbleCloud& c) {
    key.add("lambda", c.lambda);
    for (const auto& b : c.bubbles) {
        for (Eigen::Index j = 0; j < b.center.size(); ++j) key.add("P", b.center[j]);
        key.add("Lambda", b.scale);
    }
    return key;
}

double epsilon_ih(double Li, double Lh, const Eigen::VectorXd& Pi, const Eigen::VectorXd& Ph, const ProblemParams& p) {
    const double base = Li / Lh + Lh / Li + Li * Lh * (Pi - Ph).squaredNorm();
    return std::pow(base, -p.alpha);
}

double depsilon_ih(double Li, double Lh, const Eigen::VectorXd& Pi, const Eigen::VectorXd& Ph,
                   const ProblemParams& p) {
    const double D2 = (Pi - Ph).squaredNorm();
    const double base = Li / Lh + Lh / Li + Li * Lh * D2;
    return -p.alpha * std::pow(base, -p.alpha - 1.0) * (1.0 / Lh - Lh / (Li * Li) + Lh * D2);
}

InteractionReport interaction_check(double Li, double Lh, const std::vector<double>& Ds, const ProblemParams& p,
                                    double c0, const InteractionOptions& opt, const QuadCache& cache) {
    const int n = p.n;
    const BubbleFamily fam = make_family(n, p.s);
    InteractionReport rep;
    for (double D : Ds) {
        Eigen::VectorXd Pi = Eigen::VectorXd::Zero(n), Ph = D * Eigen::VectorXd::Unit(n, 0);
        const Bubble bi{Pi, Li}, bh{Ph, Lh};
        std::vector<Cell> cells = {{Pi, Ph - Pi, 1.0 / Li, -2.0}, {Ph, Pi - Ph, 1.0 / Lh, -2.0}};
        CellOptions co = cell_options(opt.tol);
        co.axisymmetric = true;
        auto run = [&](const char* op, auto&& g) {
            CacheKey key(op);
            key.add("n", n).add("s", p.s).add("Li", Li).add("Lh", Lh).add("D", D).add("tol", opt.tol);
            return cache.get_or_compute(key, [&] { return integrate_cells(g, cells, n, 2.0 * n, co); });
        };
        QuadResult lhs = run("interaction_lhs", [&](const Eigen::VectorXd& x) {
            return std::pow(bubble_eval(fam, bh, x), fam.p) * bubble_grad_scale(fam, bi, x);
        });
        QuadResult sw = run("interaction_swapped", [&](const Eigen::VectorXd& x) {
            return fam.p * bubble_eval(fam, bh, x) * std::pow(bubble_eval(fam, bi, x), fam.p - 1.0) *
                   bubble_grad_scale(fam, bi, x);
        });
        InteractionRow row;
        row.D = D;
        row.eps = epsilon_ih(Li, Lh, Pi, Ph, p);
        row.lhs = lhs.value;
        row.lhs_error = lhs.error_estimate;
        row.rhs = c0 * depsilon_ih(Li, Lh, Pi, Ph, p);
        row.rel_error = std::abs(row.lhs / row.rhs - 1.0);
        row.swapped = sw.value;
        row.swapped_error = sw.error_estimate;
        row.censored = std::abs(row.lhs - row.rhs) <= opt.censor_factor * row.lhs_error;
        rep.rows.push_back(row);
    }
    std::vector<std::pair<double, double>> pts;
    const double e = n / (n - 2.0 * p.s);
    for (const auto& r : rep.rows)
        if (!r.censored) pts.push_back({std::pow(r.eps, e) * std::abs(std::log(r.eps)), std::abs(r.lhs - r.rhs)});
    std::sort(pts.begin(), pts.end());
    if (pts.size() >= 3) {
        std::vector<double> xs, ys;
        for (const auto& [x, y] : pts) {
            xs.push_back(x);
            ys.push_back(y);
        }
        rep.fit = fit_rate(xs, ys);
        rep.fit_valid = true;
    }
    return rep;
}

ResidualStudy residual_decay_study(const ProblemParams& p, const std::vector<int>& ls, const Constants& c,
                                   const KFieldOptions& kopt, const PlanOptions& plan_opt) {
    ResidualStudy out;
    out.predicted_exponent = -(0.5 * (p.n + 2.0 * p.s) - p.tau);
    KFieldOptions unit = kopt;
    unit.unit = true;
    for (int l : ls) {
        ProblemParams pl = p;
        pl.l = l;
        pl = validate_params(pl);
        const double lam = derive_lambda(pl);
        const LatticeConfig lat = build_centers(pl, lam);
        const Eigen::VectorXd b = maximize_F(interaction_matrix(lat), c.c1, c.c2, pl);
        const BubbleCloud cloud = cloud_at(lat, b.array().pow(-1.0 / pl.alpha).matrix());
        const SamplePlan plan = default_plan(lat, plan_opt);

        BubbleCloud single = cloud;
        single.bubbles.resize(1);
        const KField fu = make_kfield(pl, unit);
        ResidualRow row;
        row.l = l;
        row.lambda = lam;
        row.control_norm =
            dstar_norm([&](const Eigen::VectorXd& x) { return residual_lm_eval(single, fu, x); }, lat, pl, lam, plan)
                .value;
        if (kopt.unit) {
            // The K == 1 mode studies the single-bubble control, an exact solution.
            row.argmax = dstar_norm([&](const Eigen::VectorXd& x) { return residual_lm_eval(single, fu, x); }, lat,
                                    pl, lam, plan);
        } else {
            const KField kf = make_kfield(pl, kopt);
            row.argmax =
                dstar_norm([&](const Eigen::VectorXd& x) { return residual_lm_eval(cloud, kf, x); }, lat, pl, lam, plan);
        }
        row.norm = row.argmax.value;
        out.rows.push_back(row);
    }
    if (!out.rows.empty()) {
        const ResidualRow& r0 = out.rows.front();
        for (auto& r : out.rows) r.predicted_bound = r0.norm * std::pow(r.lambda / r0.lambda, out.predicted_exponent);
    }
    bool positive = out.rows.size() >= 3;
    std::vector<double> xs, ys;
    for (const auto& r : out.rows) {
        positive = positive && r.norm > 0.0;
        xs.push_back(r.lambda);
        ys.push_back(r.norm);
    }
    if (positive) {
        out.fit = fit_rate(xs, ys);
        out.fit_valid = true;
    }
    return out;
}

bool significant_decrease(const std::vector<double>& values, const std::vector<double>& errors) {
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
        if (!(std::abs(values[i]) - std::abs(values[i + 1]) > errors[i] + errors[i + 1])) return false;
    return true;
}

ExpansionStudy expansion_study(const ProblemParams& p, const std::vector<int>& ls, const Constants& c,
                               const KFieldOptions& kopt, const ExpansionOptions& opt, const QuadCache& cache) {
    ExpansionStudy out;
    const int n = p.n;
    out.balance_factor = std::numeric_limits<double>::infinity();
    auto cached = [&](const char* op, const KField& kf, const BubbleCloud& cl, int i, int j, double tol, auto&& fn) {
        CacheKey key(op);
        add_problem(key, kf);
        add_cloud(key, cl);
        key.add("i", i).add("j", j).add("tol", tol);
        return cache.get_or_compute(key, fn);
    };
    for (int l : ls) {
        ProblemParams pl = p;
        pl.l = l;
        pl = validate_params(pl);
        const double lam = derive_lambda(pl);
        const double lb = std::pow(lam, -pl.beta);
        const LatticeConfig lat = build_centers(pl, lam);
        const KField kf = make_kfield(pl, kopt);
        const Eigen::Index N = lat.size();
        ExpansionRow row;
        row.l = l;
        row.lambda = lam;

        const Eigen::VectorXd scales = Eigen::VectorXd::Constant(N, opt.scale);
        const BubbleCloud cloud = cloud_at(lat, scales);
        const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(n, N);
        // The cutoff in K limits the attainable accuracy of every gradient
        // integral; the achieved error is carried into the monotonicity test.
        CellOptions sopt = cell_options(opt.scale_tol);
        sopt.throw_on_failure = false;
        QuadResult rs = cached("grad_scale", kf, cloud, 0, -1, opt.scale_tol,
                               [&] { return numeric_grad_scale(cloud, kf, 0, sopt); });
        row.nodes += rs.nodes_used;
        row.converged = row.converged && rs.converged;
        row.scale_numeric = rs.value / lb;
        row.scale_error = rs.error_estimate / lb;
        row.scale_lead = reduced_gradient_asymptotic(zero, scales, c, lat, pl).scale[0] / lb;

        row.center_numeric.resize(n);
        row.center_lead.resize(n);
        row.center_error.resize(n);
        for (int j = 0; j < n; ++j) {
            BubbleCloud moved = cloud;
            moved.bubbles[0].center[j] += opt.offset;
            Eigen::MatrixXd off = zero;
            off(j, 0) = opt.offset;
            CellOptions copt = cell_options(opt.center_tol);
            copt.throw_on_failure = false;
            QuadResult rc = cached("grad_center", kf, moved, 0, j, opt.center_tol,
                                   [&] { return numeric_grad_center(moved, kf, 0, j, copt); });
            row.nodes += rc.nodes_used;
            row.converged = row.converged && rc.converged;
            row.center_numeric[j] = rc.value / lb;
            row.center_error[j] = rc.error_estimate / lb;
            row.center_lead[j] = reduced_gradient_asymptotic(off, scales, c, lat, pl).center(j, 0) / lb;
        }

        if (opt.balance && N > 1) {
            const Eigen::VectorXd b = maximize_F(interaction_matrix(lat), c.c1, c.c2, pl);
            const Eigen::VectorXd sb = b.array().pow(-1.0 / pl.alpha).matrix();
            const BubbleCloud at_b = cloud_at(lat, sb);
            CellOptions bopt = cell_options(opt.balance_tol);
            bopt.throw_on_failure = false;
            QuadResult rb = cached("grad_scale", kf, at_b, 0, -1, opt.balance_tol,
                                   [&] { return numeric_grad_scale(at_b, kf, 0, bopt); });
            row.nodes += rb.nodes_used;
            row.converged = row.converged && rb.converged;
            const AsymptoticGradient ag = reduced_gradient_asymptotic(zero, sb, c, lat, pl);
            row.balance_scale = sb[0];
            row.balance_numeric = rb.value / lb;
            row.balance_error = rb.error_estimate / lb;
            row.balance_self = ag.self_term[0] / lb;
            row.balance_interaction = ag.interaction_term[0] / lb;
            out.balance_factor =
                std::min(out.balance_factor, std::min(std::abs(row.balance_self), std::abs(row.balance_interaction)) /
                                                 std::abs(row.balance_numeric));
        }
        out.rows.push_back(row);
    }
    std::vector<double> v, e;
    for (const auto& r : out.rows) {
        v.push_back(r.scale_numeric - r.scale_lead);
        e.push_back(r.scale_error);
    }
    out.scale_monotone = significant_decrease(v, e);
    for (int j = 0; j < n; ++j) {
        v.clear();
        e.clear();
        for (const auto& r : out.rows) {
            v.push_back(r.center_numeric[j] - r.center_lead[j]);
            e.push_back(r.center_error[j]);
        }
        out.center_monotone.push_back(significant_decrease(v, e));
    }
    return out;
}

namespace {

LemmaA1 lemma_a1(int n, long trials, std::mt19937_64& rng) {
    LemmaA1 out;
    out.trials = trials;
    Eigen::VectorXd xi(n), xj(n), y(n);
    for (long t = 0; t < trials; ++t) {
        const double L = std::pow(10.0, uniform(rng, -1.0, 3.0));
        for (int c = 0; c < n; ++c) {
            xi[c] = uniform(rng, -L, L);
            xj[c] = uniform(rng, -L, L);
            y[c] = uniform(rng, -L, L);
        }
        if (t % 4 == 1) xj = xi;
        const double a = uniform(rng, 0.0, 10.0), b = uniform(rng, 0.0, 10.0);
        double sigma = uniform(rng, 0.0, std::min(a, b));
        if (t % 4 == 2) sigma = 0.0;
        if (t % 4 == 3) sigma = std::min(a, b);
        const double di = 1.0 + (y - xi).norm(), dj = 1.0 + (y - xj).norm(), dij = 1.0 + (xi - xj).norm();
        const double lhs = std::pow(di, -a) * std::pow(dj, -b);
        const double rhs = std::pow(2.0, sigma) * std::pow(dij, -sigma) *
                           (std::pow(di, -(a + b - sigma)) + std::pow(dj, -(a + b - sigma)));
        out.max_ratio = std::max(out.max_ratio, lhs / rhs);
        if (!(lhs <= rhs)) {
            ++out.failures;
            if (out.counterexamples.size() < 10) {
                std::ostringstream os;
                os.precision(17);
                os << "alpha=" << a << " beta=" << b << " sigma=" << sigma << " x_i=(" << xi.transpose()
                   << ") x_j=(" << xj.transpose() << ") y=(" << y.transpose() << ")";
                out.counterexamples.push_back(os.str());
            }
        }
    }
    return out;
}

LemmaA2Row lemma_a2(const ProblemParams& p, double sigma, const LemmaOptions& opt, std::mt19937_64& rng) {
    const int n = p.n;
    const double ns = n - 2.0 * p.s;
    LemmaA2Row row;
    row.sigma = sigma;
    row.exponent = std::min(sigma, ns);
    row.asserted = std::abs(sigma - ns) > 1e-12;
    const double decay = 2.0 * p.s + sigma;
    auto f = [&](const Eigen::VectorXd& z) { return std::pow(1.0 + z.norm(), -decay); };
    CellOptions co = cell_options(opt.a2_tol);
    co.axisymmetric = true;
    const std::vector<Eigen::VectorXd> features = {Eigen::VectorXd::Zero(n)};
    double running = 0.0;
    for (int c = 0; c < opt.a2_samples; ++c) {
        const double r = std::pow(10.0, uniform(rng, -2.0, std::log10(opt.a2_rmax)));
        const Eigen::VectorXd y = r * random_direction(rng, n);
        const QuadResult q = riesz_convolve(f, y, n, p.s, decay, co, features);
        const double ratio = q.value * std::pow(1.0 + r, row.exponent);
        if (ratio > running) {
            running = ratio;
            row.argmax_radius = r;
        }
        if (c + 1 == opt.a2_samples / 2) row.half_max = running;
    }
    row.final_max = running;
    row.growth = (row.final_max - row.half_max) / row.half_max;
    return row;
}

LemmaA3Row lemma_a3(const ProblemParams& p, int m, double theta, int samples, std::mt19937_64& rng) {
    ProblemParams pm = p;
    pm.m = m;
    pm = validate_params(pm);
    const LatticeConfig lat = build_centers(pm, derive_lambda(pm));
    const double sp = lat.spacing;
    const double rb = ball_radius_factor(pm);
    LemmaA3Row row;
    row.m = m;
    row.C_rep = 1.0;
    row.inner_min = std::numeric_limits<double>::infinity();
    for (int c = 0; c < samples; ++c) {
        const Eigen::Index i = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(lat.size()));
        const double r = sp * std::pow(10.0, uniform(rng, -3.0, std::log10(4.0 * (m + 1))));
        const Eigen::VectorXd y = lat.centers.col(i) + r * random_direction(rng, pm.n);
        const Eigen::Index own = region_index(lat, y);
        const double d = (y - lat.centers.col(own)).norm();
        double sum = 0.0;
        for (Eigen::Index j = 0; j < lat.size(); ++j) sum += std::pow(1.0 + (y - lat.centers.col(j)).norm(), -theta);
        double base;
        if (d < sp) {
            base = std::pow(1.0 + d, -theta);
            ++row.inner;
            row.inner_min = std::min(row.inner_min, sum / base);
        } else if (d < rb * sp) {
            base = std::pow(1.0 + d, -(theta - pm.k)) * std::pow(sp, -pm.k);
            ++row.middle;
        } else {
            base = std::pow(static_cast<double>(m), pm.k) * std::pow(1.0 + d, -theta);
            ++row.outer;
        }
        const double ratio = sum / base;
        row.C_rep = std::max(row.C_rep, std::max(ratio, 1.0 / ratio));
    }
    return row;
}

}  // namespace

LemmaReport lemma_suite(const ProblemParams& p, std::uint64_t seed, const LemmaOptions& opt) {
    if (!(opt.a3_theta > p.k)) throw DomainError("lemma_suite: the sandwich exponent must exceed k");
    LemmaReport rep;
    std::mt19937_64 rng(seed);
    rep.a1 = lemma_a1(p.n, opt.a1_trials, rng);
    rep.a1_pass = rep.a1.failures == 0;

    std::vector<double> sigmas = opt.a2_sigmas;
    const double ns = p.n - 2.0 * p.s;
    if (sigmas.empty()) sigmas = {1.0, ns - 0.05, ns, ns + 0.05, ns + 1.0};
    rep.a2_pass = true;
    for (double sg : sigmas) {
        std::mt19937_64 r2(seed ^ (0x9e3779b97f4a7c15ULL * (rep.a2.size() + 1)));
        rep.a2.push_back(lemma_a2(p, sg, opt, r2));
        const auto& row = rep.a2.back();
        if (row.asserted && !(row.growth < 0.01)) rep.a2_pass = false;
    }

    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    bool inner_ok = true;
    for (int m : opt.a3_ms) {
        std::mt19937_64 r3(seed ^ (0xbf58476d1ce4e5b9ULL * static_cast<std::uint64_t>(m)));
        rep.a3.push_back(lemma_a3(p, m, opt.a3_theta, opt.a3_samples, r3));
        lo = std::min(lo, rep.a3.back().C_rep);
        hi = std::max(hi, rep.a3.back().C_rep);
        inner_ok = inner_ok && rep.a3.back().inner_min >= 1.0;
    }
    rep.a3_variation = rep.a3.empty() ? 0.0 : (hi - lo) / lo;
    rep.a3_pass = inner_ok && rep.a3_variation < 0.2;
    return rep;
}

void require_pass(const LemmaReport& r) {
    if (r.pass()) return;
    std::ostringstream msg;
    msg << "lemma suite failed:";
    if (!r.a1_pass) {
        msg << " pointwise inequality has " << r.a1.failures << " counterexamples";
        for (const auto& c : r.a1.counterexamples) msg << "\n  " << c;
    }
    if (!r.a2_pass) {
        msg << " Riesz ratio running max did not settle:";
        for (const auto& row : r.a2)
            if (row.asserted && !(row.growth < 0.01)) msg << " sigma=" << row.sigma << " growth=" << row.growth;
    }
    if (!r.a3_pass) msg << " lattice sandwich constant varies by " << r.a3_variation << " across m";
    throw SuiteFailure(msg.str());
}

}  // namespace bubblekit
