#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "glow/commands.hpp"
#include "json.hpp"

namespace {

struct Args {
    std::string config;
    int jobs = 0;
    long long seed = -1;
};

void add_common(CLI::App* sub, Args& a, bool config_required = true) {
    auto* opt = sub->add_option("--config", a.config, "run configuration (JSON)");
    if (config_required) opt->required();
    sub->add_option("--jobs", a.jobs, "solver thread count (default: all cores)");
    sub->add_option("--seed", a.seed, "override the configured noise seed");
}

glow::RunConfig load(const Args& a) {
    glow::RunConfig c = glow::load_config(a.config);
    if (a.seed >= 0) c.seed = static_cast<uint64_t>(a.seed);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"layer-stripping permittivity reconstruction from backscattered wave data"};
    app.require_subcommand(1);

    Args a;
    std::vector<std::string> run_dirs;
    std::string csv_path;

    CLI::App* sim = app.add_subcommand("simulate", "forward runs: traces + transform stacks");
    add_common(sim, a);
    CLI::App* pre = app.add_subcommand("preprocess", "measurement cleanup to the data plane");
    add_common(pre, a);
    CLI::App* inv = app.add_subcommand("invert", "layer-stripping reconstruction");
    add_common(inv, a);
    CLI::App* post = app.add_subcommand("postprocess", "shape refinement + image export");
    add_common(post, a);
    CLI::App* rep = app.add_subcommand("report", "summary table over completed runs");
    rep->add_option("dirs", run_dirs, "run directories");
    rep->add_option("--config", a.config, "JSON with a \"runs\" array");
    rep->add_option("--csv", csv_path, "also write the table to this CSV file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
#ifdef _OPENMP
        if (a.jobs > 0) omp_set_num_threads(a.jobs);
#endif
        if (sim->parsed()) {
            glow::cmd_simulate(load(a));
        } else if (pre->parsed()) {
            glow::cmd_preprocess(load(a));
        } else if (inv->parsed()) {
            glow::cmd_invert(load(a));
        } else if (post->parsed()) {
            glow::cmd_postprocess(load(a));
        } else if (rep->parsed()) {
            if (!a.config.empty()) {
                std::ifstream is(a.config);
                if (!is) throw glow::ConfigError("cannot read config file " + a.config);
                nlohmann::json j;
                try {
                    j = nlohmann::json::parse(is);
                } catch (const std::exception& e) {
                    throw glow::ConfigError(std::string("config JSON parse error: ") + e.what());
                }
                if (j.contains("runs"))
                    for (const auto& d : j.at("runs"))
                        run_dirs.push_back(d.get<std::string>());
            }
            glow::cmd_report(run_dirs, csv_path);
        }
        return 0;
    } catch (const glow::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
