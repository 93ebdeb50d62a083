#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bubblekit/lattice.hpp"

namespace bubblekit {

enum class SampleTag { NearShell, Segment, FarField, Extra };

const char* tag_name(SampleTag t);

struct SamplePlan {
    Eigen::MatrixXd points;  // n x M
    std::vector<SampleTag> tags;

    Eigen::Index size() const { return points.cols(); }
    void append(const Eigen::VectorXd& y, SampleTag t);
};

struct PlanOptions {
    int per_shell = 20;
    int far_rays = 26;
    int far_steps = 12;
    std::uint64_t seed = 0x5eed;
};

// Shells about every center, midpoints and quarter points of every center
// pair, and far-field rays out to 4 (m+1) lambda l.
SamplePlan default_plan(const LatticeConfig& cfg, const PlanOptions& opt = {});

double gamma_weight(const LatticeConfig& cfg, const ProblemParams& p, double lambda,
                    const Eigen::Ref<const Eigen::VectorXd>& y);

// gamma(y) sum_h (1+|y-X^h|)^{-(n-2s)/2 - tau - shift}
double comparison_function(const LatticeConfig& cfg, const ProblemParams& p, double lambda,
                           const Eigen::Ref<const Eigen::VectorXd>& y, double shift);

struct NormResult {
    double value = 0.0;
    Eigen::Index index = -1;
    Eigen::VectorXd argmax;
    SampleTag tag = SampleTag::Extra;
};

using Field = std::function<double(const Eigen::VectorXd&)>;

NormResult star_norm(const Field& u, const LatticeConfig& cfg, const ProblemParams& p, double lambda,
                     const SamplePlan& plan);
NormResult dstar_norm(const Field& g, const LatticeConfig& cfg, const ProblemParams& p, double lambda,
                      const SamplePlan& plan);

std::string plan_csv(const SamplePlan& plan);

}  // namespace bubblekit
