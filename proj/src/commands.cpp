#include "bubblekit/commands.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "bubblekit/constants.hpp"
#include "bubblekit/error.hpp"
#include "bubblekit/lattice.hpp"
#include "bubblekit/special.hpp"

namespace bubblekit {

using nlohmann::json;

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

void write_report(const RunConfig& c, const json& report) {
    write_file(c.output_dir / "report.json", report.dump(2) + "\n");
}

json quad_json(const QuadResult& r) {
    return {{"value", r.value}, {"error_estimate", r.error_estimate}, {"nodes_used", r.nodes_used}};
}

json fit_json(const RateFit& f) {
    return {{"xs", f.xs}, {"ys", f.ys}, {"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
}

json norm_json(const NormResult& r) {
    return {{"value", r.value}, {"argmax_point", vector_json(r.argmax)}, {"argmax_tag", tag_name(r.tag)}};
}

std::string g17(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

QuadCache cache_for(const RunConfig& c) { return QuadCache(c.cache_dir); }

// Runs a command body and maps the error family to its exit code.
template <class Body>
int guarded(const RunConfig& c, const char* name, std::ostream& log, int box_code, Body&& body) {
    try {
        return body();
    } catch (const InvalidParam& e) {
        log << name << ": invalid parameters: " << e.what() << "\n";
        write_report(c, {{"command", name}, {"status", "invalid"}, {"error", e.what()}});
        return kExitInvalid;
    } catch (const ConstructionError& e) {
        log << name << ": " << e.what() << "\n";
        write_report(c, {{"command", name}, {"status", "invalid"}, {"error", e.what()}});
        return kExitInvalid;
    } catch (const NoConvergence& e) {
        log << name << ": " << e.what() << "\n";
        write_report(c, {{"command", name}, {"status", "no_convergence"}, {"error", e.what()}});
        return kExitQuadrature;
    } catch (const BoxEscape& e) {
        log << name << ": " << e.what() << "\n";
        write_report(c, {{"command", name}, {"status", "box_escape"}, {"error", e.what()}, {"advice", "increase l"}});
        return box_code;
    } catch (const BoxError& e) {
        log << name << ": " << e.what() << "\n";
        write_report(c, {{"command", name}, {"status", "box_error"}, {"error", e.what()}, {"advice", "decrease delta0"}});
        return box_code;
    } catch (const SuiteFailure& e) {
        log << name << ": " << e.what() << "\n";
        return kExitSuite;
    }
}

}  // namespace

int cmd_validate(const RunConfig& c, std::ostream& log) {
    return guarded(c, "validate", log, kExitBox, [&] {
        const ProblemParams p = validate_params(c.params);
        const double lam = derive_lambda(p);
        const KField f = make_kfield(p, c.kfield);
        json rep;
        rep["command"] = "validate";
        rep["status"] = "ok";
        rep["params"] = params_to_json(p);
        rep["lambda"] = lam;
        rep["lambda_identity_ratio"] = std::pow(lam, p.beta) / std::pow(lam * p.l, p.n - 2.0 * p.s);
        rep["bubble_count"] = p.bubble_count();
        rep["kfield"] = {{"k_min", f.k_min}, {"k_max", f.k_max}, {"saturation", f.saturation},
                         {"unit", f.unit},   {"cutoff_inner", f.cutoff_inner}, {"cutoff_outer", f.cutoff_outer}};
        write_report(c, rep);
        log << "validate: ok, lambda = " << lam << "\n";
        return kExitOk;
    });
}

json constants_report(const RunConfig& c) {
    const ProblemParams p = validate_params(c.params);
    const Constants k = compute_constants(p, c.tol, cache_for(c));
    const double ns = p.n - 2.0 * p.s;
    const double base_exact = beta_radial_integral(p.n, 0.5 * (p.n + 2.0 * p.s));
    const double mn_exact = abs_moment_integral(p.n, p.beta, p.n);
    const double mn1_exact = abs_moment_integral(p.n, p.beta, p.n + 1.0);
    json rep;
    rep["command"] = "constants";
    rep["status"] = "ok";
    rep["params"] = params_to_json(p);
    rep["C0"] = k.C0;
    rep["c0"] = k.c0;
    rep["c1"] = k.c1;
    rep["c2"] = k.c2;
    rep["c3"] = k.c3;
    rep["integrals"] = {{"base", quad_json(k.base_integral)},
                        {"moment_n", quad_json(k.moment_n)},
                        {"moment_n1", quad_json(k.moment_n1)}};
    rep["c2_over_c0"] = k.c2 / k.c0;
    rep["c2_over_c0_delta"] = k.c2 / k.c0 - 0.5 * ns;
    rep["oracle_relative_delta"] = {{"base", k.base_integral.value / base_exact - 1.0},
                                    {"moment_n", k.moment_n.value / mn_exact - 1.0},
                                    {"moment_n1", k.moment_n1.value / mn1_exact - 1.0}};
    rep["positive"] = k.c0 > 0 && k.c1 > 0 && k.c2 > 0 && k.c3 > 0;
    return rep;
}

int cmd_constants(const RunConfig& c, std::ostream& log) {
    return guarded(c, "constants", log, kExitBox, [&] {
        json rep = constants_report(c);
        write_report(c, rep);
        log << "constants: c0 = " << rep["c0"].get<double>() << ", c1 = " << rep["c1"].get<double>()
            << ", c2 = " << rep["c2"].get<double>() << ", c3 = " << rep["c3"].get<double>() << "\n";
        return kExitOk;
    });
}

namespace {

RemainderModel build_model(const RunConfig& c, const LatticeConfig& lat, const ProblemParams& p,
                           const Constants& k, const Eigen::VectorXd& b, double c_lambda, std::ostream& log) {
    const Eigen::Index N = lat.size();
    if (c.remainder_model == "zero") return zero_remainder(p.n, static_cast<int>(N));
    if (c.remainder_model == "constant") return constant_remainder(lat, c.xi, c_lambda);
    // Measured: numeric gradients at (X, Lambda(b)) minus their leading terms.
    const Eigen::VectorXd scales = b.array().pow(-1.0 / p.alpha).matrix();
    const BubbleCloud cloud = cloud_at(lat, scales);
    const KField kf = make_kfield(p, c.kfield);
    const QuadCache cache = cache_for(c);
    const double lb = std::pow(lat.lambda, -p.beta);
    const AsymptoticGradient lead =
        reduced_gradient_asymptotic(Eigen::MatrixXd::Zero(p.n, N), scales, k, lat, p);
    Eigen::MatrixXd center(p.n, N);
    Eigen::VectorXd scale(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        const int ii = static_cast<int>(i);
        CacheKey ks("grad_scale");
        add_cloud(add_problem(ks, kf), cloud).add("i", ii).add("j", -1).add("tol", c.expansion.scale_tol);
        QuadResult rs = cache.get_or_compute(
            ks, [&] { return numeric_grad_scale(cloud, kf, ii, cell_options(c.expansion.scale_tol)); });
        scale[i] = (rs.value - lead.scale[i]) / lb;
        for (int j = 0; j < p.n; ++j) {
            CacheKey kc("grad_center");
            add_cloud(add_problem(kc, kf), cloud).add("i", ii).add("j", j).add("tol", c.expansion.center_tol);
            QuadResult rc = cache.get_or_compute(
                kc, [&] { return numeric_grad_center(cloud, kf, ii, j, cell_options(c.expansion.center_tol)); });
            center(j, i) = (rc.value - lead.center(j, i)) / lb;
        }
        log << "reduce: measured remainders for bubble " << i << "\n";
    }
    return measured_remainder(center, scale, scales, k, p);
}

}  // namespace

int cmd_reduce(const RunConfig& c, std::ostream& log) {
    return guarded(c, "reduce", log, kExitBox, [&] {
        const ProblemParams p = validate_params(c.params);
        const double lam = derive_lambda(p);
        const Constants k = compute_constants(p, c.tol, cache_for(c));
        const LatticeConfig lat = build_centers(p, lam);
        const Eigen::MatrixXd A = interaction_matrix(lat);
        const Eigen::VectorXd b = maximize_F(A, k.c1, k.c2, p);
        const Eigen::VectorXd grad = F_gradient(b, A, k.c1, k.c2, p);
        const ClaimBounds cb = claim_bounds(A, k.c1, k.c2, p);
        const ScaleBox box = scale_box(b, p);
        const double C4 = hessian_gap(b, A, k.c1, k.c2, p);
        std::mt19937_64 rng(c.seed);
        const double sampled = hessian_gap_sampled(F_hessian(b, A, k.c1, k.c2, p), 1000, rng);
        const double c_lambda = c.c_lambda > 0.0 ? c.c_lambda : default_c_lambda(lam);
        const RemainderModel model = build_model(c, lat, p, k, b, c_lambda, log);
        FixedPointOptions fo;
        fo.c_lambda = c_lambda;
        const FixedPointResult fp = fixed_point_solve(lat, k, p, b, model, fo);

        const Eigen::VectorXd scales = fp.state.scales(p);
        BubbleCloud cloud = cloud_at(lat, scales);
        for (std::size_t i = 0; i < cloud.bubbles.size(); ++i)
            cloud.bubbles[i].center += fp.state.offsets.col(static_cast<Eigen::Index>(i));

        json rep;
        rep["command"] = "reduce";
        rep["status"] = "ok";
        rep["params"] = params_to_json(p);
        rep["lambda"] = lam;
        rep["interaction_matrix"] = matrix_json(A);
        rep["b"] = vector_json(b);
        if (lat.size() == 2) rep["b_closed_form"] = two_point_maximizer(k.c1, k.c2, p);
        rep["gradient_residual"] = grad.lpNorm<Eigen::Infinity>();
        rep["claim_bounds"] = {{"lower", cb.lower}, {"upper", cb.upper}};
        rep["scale_box"] = {{"C1", box.C1}, {"C2", box.C2}};
        rep["C4"] = C4;
        rep["C4_sampled_min"] = sampled;
        rep["remainder_model"] = c.remainder_model;
        rep["c_lambda"] = fp.c_lambda;
        rep["box"] = {{"offset_radius", fp.offset_radius}, {"theta_radius", fp.theta_radius}};
        rep["fixed_point"] = {{"iterations", fp.iterations}, {"residual", fp.residual}};
        rep["state"] = state_to_json(fp.state);
        rep["scales"] = vector_json(scales);
        bool inside = true;
        for (Eigen::Index i = 0; i < scales.size(); ++i) inside = inside && scales[i] >= box.C1 && scales[i] <= box.C2;
        rep["scales_in_box"] = inside;
        write_report(c, rep);
        write_file(c.output_dir / "state.json", state_to_json(fp.state).dump(2) + "\n");
        write_file(c.output_dir / "cloud.json", cloud_to_json(cloud).dump(2) + "\n");
        std::ostringstream tr;
        tr << "iter,residual,offset_max,theta_max\n";
        for (const auto& row : fp.trace)
            tr << row.iter << "," << g17(row.residual) << "," << g17(row.offset_max) << "," << g17(row.theta_max)
               << "\n";
        write_file(c.output_dir / "trace.csv", tr.str());
        std::ostringstream cs;
        cs << "index";
        for (int j = 0; j < p.n; ++j) cs << ",x" << j;
        cs << "\n";
        for (Eigen::Index i = 0; i < lat.size(); ++i) {
            cs << i;
            for (int j = 0; j < p.n; ++j) cs << "," << g17(lat.centers(j, i));
            cs << "\n";
        }
        write_file(c.output_dir / "centers.csv", cs.str());
        log << "reduce: fixed point after " << fp.iterations << " iterations, residual " << fp.residual << "\n";
        return kExitOk;
    });
}

json verify_report(const RunConfig& c, std::ostream& log) {
    const ProblemParams p = validate_params(c.params);
    const QuadCache cache = cache_for(c);
    const Constants k = compute_constants(p, c.tol, cache);
    json rep;
    rep["command"] = "verify";
    rep["config"] = config_to_json(c);
    rep["constants"] = {{"c0", k.c0}, {"c1", k.c1}, {"c2", k.c2}, {"c3", k.c3}};

    const ResidualStudy rs = residual_decay_study(p, c.l_list, k, c.kfield);
    json rows = json::array();
    bool control_zero = true;
    for (const auto& r : rs.rows) {
        rows.push_back({{"l", r.l},
                        {"lambda", r.lambda},
                        {"norm", norm_json(r.argmax)},
                        {"predicted_bound", r.predicted_bound},
                        {"control_norm", r.control_norm}});
        control_zero = control_zero && r.control_norm == 0.0;
    }
    const double threshold = rs.predicted_exponent + 0.15;
    rep["residual_decay"] = {{"rows", rows},
                             {"predicted_exponent", rs.predicted_exponent},
                             {"slope_threshold", threshold},
                             {"fit", rs.fit_valid ? fit_json(rs.fit) : json(nullptr)},
                             {"control_zero", control_zero},
                             {"pass", rs.fit_valid && rs.fit.slope <= threshold && control_zero},
                             {"sampled_sup_is_lower_bound", true}};
    log << "verify: residual decay done\n";

    if (c.expansions) {
        const ExpansionStudy es = expansion_study(p, c.l_list, k, c.kfield, c.expansion, cache);
        json erows = json::array();
        for (const auto& r : es.rows)
            erows.push_back({{"l", r.l},
                             {"lambda", r.lambda},
                             {"scale", {{"numeric", r.scale_numeric}, {"lead", r.scale_lead}, {"error", r.scale_error}}},
                             {"center",
                              {{"numeric", vector_json(r.center_numeric)},
                               {"lead", vector_json(r.center_lead)},
                               {"error", vector_json(r.center_error)}}},
                             {"balance",
                              {{"Lambda", r.balance_scale},
                               {"numeric", r.balance_numeric},
                               {"error", r.balance_error},
                               {"self_term", r.balance_self},
                               {"interaction_term", r.balance_interaction}}},
                             {"nodes_used", r.nodes},
                             {"converged", r.converged}});
        bool centers = true;
        for (bool b : es.center_monotone) centers = centers && b;
        rep["expansions"] = {{"units", "lambda^-beta"},
                             {"rows", erows},
                             {"scale_monotone", es.scale_monotone},
                             {"center_monotone", es.center_monotone},
                             {"balance_factor", es.balance_factor},
                             {"pass", es.scale_monotone && centers && es.balance_factor >= 5.0}};
        log << "verify: expansions done\n";
    }

    const InteractionReport ir = interaction_check(1.0, 1.0, c.d_list, p, k.c0, c.interaction, cache);
    json irows = json::array();
    bool decreasing = true;
    double rel50 = std::nan("");
    for (std::size_t i = 0; i < ir.rows.size(); ++i) {
        const auto& r = ir.rows[i];
        irows.push_back({{"D", r.D},
                         {"eps", r.eps},
                         {"lhs", r.lhs},
                         {"lhs_error", r.lhs_error},
                         {"rhs", r.rhs},
                         {"rel_error", r.rel_error},
                         {"swapped", r.swapped},
                         {"swapped_error", r.swapped_error},
                         {"censored", r.censored}});
        if (i > 0 && !(r.rel_error < ir.rows[i - 1].rel_error) && !r.censored) decreasing = false;
        if (r.D == 50.0) rel50 = r.rel_error;
    }
    const bool slope_ok = ir.fit_valid && std::abs(ir.fit.slope - 1.0) <= 0.15;
    rep["interaction"] = {{"rows", irows},
                          {"fit", ir.fit_valid ? fit_json(ir.fit) : json(nullptr)},
                          {"rel_error_at_50", std::isfinite(rel50) ? json(rel50) : json(nullptr)},
                          {"decreasing", decreasing},
                          {"slope_within_0.15", slope_ok},
                          {"pass", decreasing && slope_ok && std::isfinite(rel50) && rel50 < 0.02}};
    log << "verify: interaction done\n";

    const LemmaReport lr = lemma_suite(p, c.seed, c.lemmas);
    json a2 = json::array(), a3 = json::array();
    for (const auto& r : lr.a2)
        a2.push_back({{"sigma", r.sigma},
                      {"exponent", r.exponent},
                      {"half_max", r.half_max},
                      {"final_max", r.final_max},
                      {"growth", r.growth},
                      {"argmax_radius", r.argmax_radius},
                      {"asserted", r.asserted}});
    for (const auto& r : lr.a3)
        a3.push_back({{"m", r.m},
                      {"C_rep", r.C_rep},
                      {"inner", r.inner},
                      {"middle", r.middle},
                      {"outer", r.outer},
                      {"inner_min", r.inner_min}});
    rep["lemmas"] = {{"a1",
                      {{"trials", lr.a1.trials},
                       {"failures", lr.a1.failures},
                       {"max_ratio", lr.a1.max_ratio},
                       {"counterexamples", lr.a1.counterexamples},
                       {"pass", lr.a1_pass}}},
                     {"a2", {{"rows", a2}, {"pass", lr.a2_pass}}},
                     {"a3", {{"rows", a3}, {"variation", lr.a3_variation}, {"pass", lr.a3_pass}}},
                     {"pass", lr.pass()}};
    log << "verify: lemma suite done\n";
    return rep;
}

int cmd_verify(const RunConfig& c, std::ostream& log) {
    return guarded(c, "verify", log, kExitBox, [&] {
        json rep = verify_report(c, log);
        rep["status"] = "ok";
        write_report(c, rep);

        std::ostringstream rd;
        rd << "l,lambda,norm,predicted_bound\n";
        for (const auto& r : rep["residual_decay"]["rows"])
            rd << r["l"].get<int>() << "," << g17(r["lambda"].get<double>()) << ","
               << g17(r["norm"]["value"].get<double>()) << "," << g17(r["predicted_bound"].get<double>()) << "\n";
        write_file(c.output_dir / "residual_decay.csv", rd.str());

        std::ostringstream ic;
        ic << "D,eps,lhs,rhs,rel_error,censored\n";
        for (const auto& r : rep["interaction"]["rows"])
            ic << g17(r["D"].get<double>()) << "," << g17(r["eps"].get<double>()) << "," << g17(r["lhs"].get<double>())
               << "," << g17(r["rhs"].get<double>()) << "," << g17(r["rel_error"].get<double>()) << ","
               << (r["censored"].get<bool>() ? 1 : 0) << "\n";
        write_file(c.output_dir / "interaction.csv", ic.str());

        if (rep.contains("expansions")) {
            std::ostringstream ec;
            ec << "l,lambda,quantity,numeric,lead,error\n";
            for (const auto& r : rep["expansions"]["rows"]) {
                const std::string head = std::to_string(r["l"].get<int>()) + "," + g17(r["lambda"].get<double>());
                ec << head << ",scale," << g17(r["scale"]["numeric"].get<double>()) << ","
                   << g17(r["scale"]["lead"].get<double>()) << "," << g17(r["scale"]["error"].get<double>()) << "\n";
                for (std::size_t j = 0; j < r["center"]["numeric"].size(); ++j)
                    ec << head << ",center" << j << "," << g17(r["center"]["numeric"][j].get<double>()) << ","
                       << g17(r["center"]["lead"][j].get<double>()) << ","
                       << g17(r["center"]["error"][j].get<double>()) << "\n";
            }
            write_file(c.output_dir / "expansions.csv", ec.str());
        }
        if (!rep["lemmas"]["pass"].get<bool>()) {
            std::ostringstream msg;
            msg << "lemma suite failed, see " << (c.output_dir / "report.json").string();
            throw SuiteFailure(msg.str());
        }
        log << "verify: report written to " << (c.output_dir / "report.json").string() << "\n";
        return kExitOk;
    });
}

}  // namespace bubblekit
