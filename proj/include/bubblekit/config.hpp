#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "bubblekit/bubble.hpp"
#include "bubblekit/kfield.hpp"
#include "bubblekit/params.hpp"
#include "bubblekit/reduced.hpp"
#include "bubblekit/verify.hpp"

namespace bubblekit {

struct RunConfig {
    ProblemParams params;
    KFieldOptions kfield;
    std::vector<int> l_list = {2, 3, 4};
    std::vector<double> d_list = {5, 10, 20, 50, 100, 200};
    std::uint64_t seed = 20240601;
    double tol = 1e-10;  // constants
    std::string remainder_model = "constant";
    double xi = 1.0;
    double c_lambda = 0.0;  // <= 0 selects the synthetic default
    bool expansions = true;
    ExpansionOptions expansion;
    InteractionOptions interaction;
    LemmaOptions lemmas;
    std::filesystem::path cache_dir = "cache";
    std::filesystem::path output_dir = "out";
};

// Unknown keys are rejected so typos do not silently fall back to defaults.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const RunConfig& c);

nlohmann::json params_to_json(const ProblemParams& p);

nlohmann::json cloud_to_json(const BubbleCloud& c);
BubbleCloud cloud_from_json(const nlohmann::json& j, int n, double s);

nlohmann::json state_to_json(const ReducedState& s);
ReducedState state_from_json(const nlohmann::json& j);

nlohmann::json vector_json(const Eigen::VectorXd& v);
nlohmann::json matrix_json(const Eigen::MatrixXd& m);  // row-major nested arrays

}  // namespace bubblekit
