#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bubblekit/commands.hpp"
#include "bubblekit/error.hpp"

namespace {

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-bump construction toolkit for the fractional Nirenberg problem"};
    app.require_subcommand(1);

    std::string config_path;
    std::string l_list, cache_dir, output_dir;
    std::uint64_t seed = 0;
    double tol = 0.0;

    const char* names[] = {"validate", "constants", "reduce", "verify"};
    const char* help[] = {"check parameters, lambda and the curvature field",
                          "compute the expansion constants c0..c3",
                          "solve the reduced finite-dimensional system",
                          "run the verification studies"};
    std::vector<CLI::App*> subs;
    for (int i = 0; i < 4; ++i) {
        CLI::App* s = app.add_subcommand(names[i], help[i]);
        s->add_option("--config", config_path, "JSON configuration")->required()->check(CLI::ExistingFile);
        s->add_option("--l-list", l_list, "comma separated l values, e.g. 2,3,4");
        s->add_option("--seed", seed, "random seed");
        s->add_option("--tol", tol, "relative tolerance of the constant integrals");
        s->add_option("--cache-dir", cache_dir, "quadrature cache directory");
        s->add_option("--output-dir", output_dir, "report directory");
        subs.push_back(s);
    }
    CLI11_PARSE(app, argc, argv);

    bubblekit::RunConfig config;
    try {
        config = bubblekit::load_config(config_path);
        if (!l_list.empty()) config.l_list = parse_int_list(l_list);
        if (subs[0]->count("--seed") + subs[1]->count("--seed") + subs[2]->count("--seed") +
            subs[3]->count("--seed"))
            config.seed = seed;
        if (tol > 0.0) config.tol = tol;
        if (!cache_dir.empty()) config.cache_dir = cache_dir;
        if (!output_dir.empty()) config.output_dir = output_dir;
    } catch (const bubblekit::InvalidParam& e) {
        std::cerr << "configuration: " << e.what() << "\n";
        return bubblekit::kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "configuration: " << e.what() << "\n";
        return bubblekit::kExitError;
    }

    try {
        if (subs[0]->parsed()) return bubblekit::cmd_validate(config, std::cerr);
        if (subs[1]->parsed()) return bubblekit::cmd_constants(config, std::cerr);
        if (subs[2]->parsed()) return bubblekit::cmd_reduce(config, std::cerr);
        return bubblekit::cmd_verify(config, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bubblekit::kExitError;
    }
}
