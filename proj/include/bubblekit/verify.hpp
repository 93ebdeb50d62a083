#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bubblekit/bubble.hpp"
#include "bubblekit/cache.hpp"
#include "bubblekit/constants.hpp"
#include "bubblekit/kfield.hpp"
#include "bubblekit/lattice.hpp"
#include "bubblekit/quad.hpp"
#include "bubblekit/weights.hpp"

namespace bubblekit {

// Least-squares slope of log y against log x.
struct RateFit {
    std::vector<double> xs;
    std::vector<double> ys;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

RateFit fit_rate(const std::vector<double>& xs, const std::vector<double>& ys);

// dI/dLambda_i = -int l_m dU_i/dLambda, using (-Delta)^s U = U^p.
QuadResult numeric_grad_scale(const BubbleCloud& cloud, const KField& f, int i, const CellOptions& opt);
// dI/dP^i_j = -int l_m Z_{i,j}.
QuadResult numeric_grad_center(const BubbleCloud& cloud, const KField& f, int i, int j, const CellOptions& opt);

BubbleCloud cloud_at(const LatticeConfig& lat, const Eigen::VectorXd& scales);

CacheKey& add_problem(CacheKey& key, const KField& f);
CacheKey& add_cloud(CacheKey& key, const BubbleCloud& c);

double epsilon_ih(double Li, double Lh, const Eigen::VectorXd& Pi, const Eigen::VectorXd& Ph, const ProblemParams& p);
double depsilon_ih(double Li, double Lh, const Eigen::VectorXd& Pi, const Eigen::VectorXd& Ph,
                   const ProblemParams& p);

struct InteractionRow {
    double D = 0.0;
    double eps = 0.0;
    double lhs = 0.0;
    double lhs_error = 0.0;
    double rhs = 0.0;
    double rel_error = 0.0;
    double swapped = 0.0;  // (n+2s)/(n-2s) int U_h U_i^{4s/(n-2s)} dU_i/dLambda
    double swapped_error = 0.0;
    bool censored = false;
};

struct InteractionReport {
    std::vector<InteractionRow> rows;
    RateFit fit;  // |lhs - rhs| against eps^{n/(n-2s)} |log eps|
    bool fit_valid = false;
};

struct InteractionOptions {
    double tol = 1e-10;
    double censor_factor = 10.0;
};

InteractionReport interaction_check(double Li, double Lh, const std::vector<double>& Ds, const ProblemParams& p,
                                    double c0, const InteractionOptions& opt = {}, const QuadCache& cache = {});

struct ResidualRow {
    int l = 0;
    double lambda = 0.0;
    double norm = 0.0;
    double predicted_bound = 0.0;
    double control_norm = 0.0;  // K == 1, single bubble
    NormResult argmax;
};

struct ResidualStudy {
    std::vector<ResidualRow> rows;
    RateFit fit;
    bool fit_valid = false;
    double predicted_exponent = 0.0;
};

ResidualStudy residual_decay_study(const ProblemParams& p, const std::vector<int>& ls, const Constants& c,
                                   const KFieldOptions& kopt = {}, const PlanOptions& plan = {});

struct ExpansionOptions {
    double scale = 1.0;        // Lambda of both bubbles in the scale and center checks
    double offset = 0.1;       // P^1_j - X^1_j in the center checks
    double scale_tol = 1e-6;
    double center_tol = 1e-8;
    double balance_tol = 1e-6;
    bool balance = true;
};

struct ExpansionRow {
    int l = 0;
    double lambda = 0.0;
    // Values below are in units of lambda^{-beta}.
    double scale_numeric = 0.0, scale_lead = 0.0, scale_error = 0.0;
    Eigen::VectorXd center_numeric, center_lead, center_error;
    double balance_scale = 0.0;
    double balance_numeric = 0.0, balance_error = 0.0;
    double balance_self = 0.0, balance_interaction = 0.0;
    long nodes = 0;
    bool converged = true;  // false when a gradient integral missed its target
};

struct ExpansionStudy {
    std::vector<ExpansionRow> rows;
    bool scale_monotone = false;
    std::vector<bool> center_monotone;
    double balance_factor = 0.0;  // min over l of min(|self|, |interaction|) / |numeric|
};

// A decrease counts only when it exceeds the combined error estimates.
bool significant_decrease(const std::vector<double>& values, const std::vector<double>& errors);

ExpansionStudy expansion_study(const ProblemParams& p, const std::vector<int>& ls, const Constants& c,
                               const KFieldOptions& kopt = {}, const ExpansionOptions& opt = {},
                               const QuadCache& cache = {});

struct LemmaOptions {
    long a1_trials = 10000;
    int a2_samples = 1000;
    double a2_tol = 1e-6;
    double a2_rmax = 1e3;
    std::vector<double> a2_sigmas;  // empty selects {1, n-2s-0.05, n-2s, n-2s+0.05, n-2s+1}
    int a3_samples = 4000;
    double a3_theta = 2.0;
    std::vector<int> a3_ms = {1, 2, 3};
};

struct LemmaA1 {
    long trials = 0;
    long failures = 0;
    double max_ratio = 0.0;  // max of lhs / rhs
    std::vector<std::string> counterexamples;
};

struct LemmaA2Row {
    double sigma = 0.0;
    double exponent = 0.0;  // min(sigma, n-2s)
    double half_max = 0.0;
    double final_max = 0.0;
    double growth = 0.0;
    double argmax_radius = 0.0;
    bool asserted = true;  // false at the logarithmic endpoint
};

struct LemmaA3Row {
    int m = 0;
    double C_rep = 0.0;
    long inner = 0, middle = 0, outer = 0;
    double inner_min = 0.0;  // smallest ratio in the inner case, must be >= 1
};

struct LemmaReport {
    LemmaA1 a1;
    std::vector<LemmaA2Row> a2;
    std::vector<LemmaA3Row> a3;
    double a3_variation = 0.0;
    bool a1_pass = false, a2_pass = false, a3_pass = false;
    bool pass() const { return a1_pass && a2_pass && a3_pass; }
};

LemmaReport lemma_suite(const ProblemParams& p, std::uint64_t seed, const LemmaOptions& opt = {});

// Throws SuiteFailure naming the failing lemma and its counterexamples.
void require_pass(const LemmaReport& r);

}  // namespace bubblekit
