#include "bubblekit/weights.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "bubblekit/error.hpp"
#include "bubblekit/sampling.hpp"

namespace bubblekit {

const char* tag_name(SampleTag t) {
    switch (t) {
        case SampleTag::NearShell: return "near_shell";
        case SampleTag::Segment: return "segment";
        case SampleTag::FarField: return "far_field";
        default: return "extra";
    }
}

void SamplePlan::append(const Eigen::VectorXd& y, SampleTag t) {
    points.conservativeResize(y.size(), points.cols() + 1);
    points.col(points.cols() - 1) = y;
    tags.push_back(t);
}

SamplePlan default_plan(const LatticeConfig& cfg, const PlanOptions& opt) {
    const int n = cfg.params.n;
    const double lam = cfg.lambda;
    std::mt19937_64 rng(opt.seed);
    std::vector<Eigen::VectorXd> pts;
    std::vector<SampleTag> tags;
    const double radii[] = {0.5, 1.0, 2.0, 5.0, 10.0, 0.5 * lam, lam, 2.0 * lam};
    for (Eigen::Index i = 0; i < cfg.size(); ++i) {
        Eigen::VectorXd X = cfg.centers.col(i);
        pts.push_back(X);
        tags.push_back(SampleTag::NearShell);
        for (double r : radii)
            for (int q = 0; q < opt.per_shell; ++q) {
                // Coordinate axes first, then random directions.
                Eigen::VectorXd w = q < 2 * n ? Eigen::VectorXd((q % 2 ? -1.0 : 1.0) * Eigen::VectorXd::Unit(n, q / 2))
                                              : random_direction(rng, n);
                pts.push_back(X + r * w);
                tags.push_back(SampleTag::NearShell);
            }
    }
    for (Eigen::Index i = 0; i < cfg.size(); ++i)
        for (Eigen::Index h = i + 1; h < cfg.size(); ++h)
            for (double t : {0.25, 0.5, 0.75}) {
                pts.push_back((1.0 - t) * cfg.centers.col(i) + t * cfg.centers.col(h));
                tags.push_back(SampleTag::Segment);
            }
    Eigen::VectorXd mid = cfg.centers.rowwise().mean();
    const double reach = 4.0 * (cfg.params.m + 1) * cfg.spacing;
    for (int q = 0; q < opt.far_rays; ++q) {
        Eigen::VectorXd w = q < 2 * n ? Eigen::VectorXd((q % 2 ? -1.0 : 1.0) * Eigen::VectorXd::Unit(n, q / 2))
                                      : random_direction(rng, n);
        for (int t = 1; t <= opt.far_steps; ++t) {
            double r = cfg.spacing * std::pow(reach / cfg.spacing, static_cast<double>(t) / opt.far_steps);
            pts.push_back(mid + r * w);
            tags.push_back(SampleTag::FarField);
        }
    }
    SamplePlan plan;
    plan.points.resize(n, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t c = 0; c < pts.size(); ++c) plan.points.col(static_cast<Eigen::Index>(c)) = pts[c];
    plan.tags = std::move(tags);
    return plan;
}

double gamma_weight(const LatticeConfig& cfg, const ProblemParams& p, double lambda,
                    const Eigen::Ref<const Eigen::VectorXd>& y) {
    double d = min_center_distance(cfg, y);
    return std::min(std::pow((1.0 + d) / lambda, p.tau - p.s), 1.0);
}

double comparison_function(const LatticeConfig& cfg, const ProblemParams& p, double lambda,
                           const Eigen::Ref<const Eigen::VectorXd>& y, double shift) {
    const double e = 0.5 * (p.n - 2.0 * p.s) + p.tau + shift;
    double acc = 0.0;
    for (Eigen::Index h = 0; h < cfg.size(); ++h) acc += std::pow(1.0 + (y - cfg.centers.col(h)).norm(), -e);
    return gamma_weight(cfg, p, lambda, y) * acc;
}

namespace {

NormResult weighted_sup(const Field& u, const LatticeConfig& cfg, const ProblemParams& p, double lambda,
                        const SamplePlan& plan, double shift) {
    if (plan.size() == 0) throw DomainError("weighted norm: empty sample plan");
    NormResult out;
    for (Eigen::Index c = 0; c < plan.size(); ++c) {
        Eigen::VectorXd y = plan.points.col(c);
        double v = u(y);
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg << "weighted norm: non-finite field value at plan point " << c;
            throw NonFiniteSample(msg.str());
        }
        double r = std::abs(v) / comparison_function(cfg, p, lambda, y, shift);
        if (out.index < 0 || r > out.value) {
            out.value = r;
            out.index = c;
        }
    }
    out.argmax = plan.points.col(out.index);
    out.tag = plan.tags[static_cast<std::size_t>(out.index)];
    return out;
}

}  // namespace

NormResult star_norm(const Field& u, const LatticeConfig& cfg, const ProblemParams& p, double lambda,
                     const SamplePlan& plan) {
    return weighted_sup(u, cfg, p, lambda, plan, 0.0);
}

NormResult dstar_norm(const Field& g, const LatticeConfig& cfg, const ProblemParams& p, double lambda,
                      const SamplePlan& plan) {
    return weighted_sup(g, cfg, p, lambda, plan, 2.0 * p.s);
}

std::string plan_csv(const SamplePlan& plan) {
    std::ostringstream os;
    os.precision(17);
    for (Eigen::Index j = 0; j < plan.points.rows(); ++j) os << "x" << j << ",";
    os << "tag\n";
    for (Eigen::Index c = 0; c < plan.size(); ++c) {
        for (Eigen::Index j = 0; j < plan.points.rows(); ++j) os << plan.points(j, c) << ",";
        os << tag_name(plan.tags[static_cast<std::size_t>(c)]) << "\n";
    }
    return os.str();
}

}  // namespace bubblekit
