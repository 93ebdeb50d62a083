#include "bubblekit/config.hpp"

#include <fstream>
#include <set>

#include "bubblekit/error.hpp"

namespace bubblekit {

using nlohmann::json;

namespace {

const std::set<std::string> kKeys = {
    "n", "s", "k", "beta", "tau", "m", "l", "a", "delta0", "cutoff_inner", "cutoff_outer", "saturation", "unit_k",
    "l_list", "d_list", "seed", "tol", "remainder_model", "xi", "c_lambda", "expansions", "expansion",
    "interaction", "lemmas", "cache_dir", "output_dir"};

template <class T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json a = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vector_json(m.row(r).transpose()));
    return a;
}

namespace {

Eigen::VectorXd vector_from(const json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

}  // namespace

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw InvalidParam("configuration must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!kKeys.count(key)) throw InvalidParam("unknown configuration key: " + key);
    RunConfig c;
    ProblemParams& p = c.params;
    p.a = Eigen::Vector3d(-1.0, -0.5, -0.5);
    read(j, "n", p.n);
    read(j, "s", p.s);
    read(j, "k", p.k);
    read(j, "beta", p.beta);
    read(j, "tau", p.tau);
    read(j, "m", p.m);
    read(j, "l", p.l);
    read(j, "delta0", p.delta0);
    if (j.contains("a")) p.a = vector_from(j.at("a"));
    read(j, "cutoff_inner", c.kfield.cutoff_inner);
    read(j, "cutoff_outer", c.kfield.cutoff_outer);
    read(j, "saturation", c.kfield.saturation);
    read(j, "unit_k", c.kfield.unit);
    read(j, "l_list", c.l_list);
    read(j, "d_list", c.d_list);
    read(j, "seed", c.seed);
    read(j, "tol", c.tol);
    read(j, "remainder_model", c.remainder_model);
    read(j, "xi", c.xi);
    read(j, "c_lambda", c.c_lambda);
    read(j, "expansions", c.expansions);
    if (j.contains("expansion")) {
        const json& e = j.at("expansion");
        read(e, "scale", c.expansion.scale);
        read(e, "offset", c.expansion.offset);
        read(e, "scale_tol", c.expansion.scale_tol);
        read(e, "center_tol", c.expansion.center_tol);
        read(e, "balance_tol", c.expansion.balance_tol);
        read(e, "balance", c.expansion.balance);
    }
    if (j.contains("interaction")) {
        const json& e = j.at("interaction");
        read(e, "tol", c.interaction.tol);
        read(e, "censor_factor", c.interaction.censor_factor);
    }
    if (j.contains("lemmas")) {
        const json& e = j.at("lemmas");
        read(e, "a1_trials", c.lemmas.a1_trials);
        read(e, "a2_samples", c.lemmas.a2_samples);
        read(e, "a2_tol", c.lemmas.a2_tol);
        read(e, "a2_rmax", c.lemmas.a2_rmax);
        read(e, "a2_sigmas", c.lemmas.a2_sigmas);
        read(e, "a3_samples", c.lemmas.a3_samples);
        read(e, "a3_theta", c.lemmas.a3_theta);
        read(e, "a3_ms", c.lemmas.a3_ms);
    }
    if (j.contains("cache_dir")) c.cache_dir = j.at("cache_dir").get<std::string>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (c.remainder_model != "zero" && c.remainder_model != "constant" && c.remainder_model != "measured")
        throw InvalidParam("remainder_model must be zero, constant or measured");
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParam("cannot open configuration " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InvalidParam("configuration " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

json params_to_json(const ProblemParams& p) {
    return {{"n", p.n},         {"s", p.s}, {"k", p.k}, {"beta", p.beta}, {"tau", p.tau}, {"m", p.m},
            {"l", p.l},         {"a", vector_json(p.a)}, {"delta0", p.delta0}};
}

json config_to_json(const RunConfig& c) {
    json j = params_to_json(c.params);
    j["cutoff_inner"] = c.kfield.cutoff_inner;
    j["cutoff_outer"] = c.kfield.cutoff_outer;
    j["saturation"] = c.kfield.saturation;
    j["unit_k"] = c.kfield.unit;
    j["l_list"] = c.l_list;
    j["d_list"] = c.d_list;
    j["seed"] = c.seed;
    j["tol"] = c.tol;
    j["remainder_model"] = c.remainder_model;
    j["xi"] = c.xi;
    j["c_lambda"] = c.c_lambda;
    j["expansions"] = c.expansions;
    j["expansion"] = {{"scale", c.expansion.scale},         {"offset", c.expansion.offset},
                      {"scale_tol", c.expansion.scale_tol}, {"center_tol", c.expansion.center_tol},
                      {"balance_tol", c.expansion.balance_tol}, {"balance", c.expansion.balance}};
    j["interaction"] = {{"tol", c.interaction.tol}, {"censor_factor", c.interaction.censor_factor}};
    j["lemmas"] = {{"a1_trials", c.lemmas.a1_trials}, {"a2_samples", c.lemmas.a2_samples},
                   {"a2_tol", c.lemmas.a2_tol},       {"a2_rmax", c.lemmas.a2_rmax},
                   {"a2_sigmas", c.lemmas.a2_sigmas}, {"a3_samples", c.lemmas.a3_samples},
                   {"a3_theta", c.lemmas.a3_theta},   {"a3_ms", c.lemmas.a3_ms}};
    j["cache_dir"] = c.cache_dir.string();
    j["output_dir"] = c.output_dir.string();
    return j;
}

json cloud_to_json(const BubbleCloud& c) {
    json bubbles = json::array();
    for (const auto& b : c.bubbles) bubbles.push_back({{"P", vector_json(b.center)}, {"Lambda", b.scale}});
    return {{"lambda", c.lambda}, {"bubbles", bubbles}};
}

BubbleCloud cloud_from_json(const json& j, int n, double s) {
    BubbleCloud c;
    c.family = make_family(n, s);
    c.lambda = j.at("lambda").get<double>();
    for (const auto& b : j.at("bubbles")) {
        Bubble bb{vector_from(b.at("P")), b.at("Lambda").get<double>()};
        if (bb.center.size() != n) throw InvalidParam("bubble center has the wrong dimension");
        if (!(bb.scale > 0.0)) throw InvalidParam("bubble scale must be positive");
        c.bubbles.push_back(bb);
    }
    return c;
}

json state_to_json(const ReducedState& s) {
    json offsets = json::array();
    for (Eigen::Index i = 0; i < s.offsets.cols(); ++i) offsets.push_back(vector_json(s.offsets.col(i)));
    return {{"b", vector_json(s.b)}, {"d", vector_json(s.d)}, {"theta", vector_json(s.theta)}, {"offsets", offsets}};
}

ReducedState state_from_json(const json& j) {
    ReducedState s;
    s.b = vector_from(j.at("b"));
    s.d = vector_from(j.at("d"));
    s.theta = vector_from(j.at("theta"));
    const json& off = j.at("offsets");
    const Eigen::Index N = static_cast<Eigen::Index>(off.size());
    const Eigen::Index n = N > 0 ? static_cast<Eigen::Index>(off[0].size()) : 0;
    s.offsets.resize(n, N);
    for (Eigen::Index i = 0; i < N; ++i) s.offsets.col(i) = vector_from(off[static_cast<std::size_t>(i)]);
    return s;
}

}  // namespace bubblekit
