#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include "dynlab/app/commands.hpp"
#include "dynlab/app/config.hpp"
#include "dynlab/errors.hpp"

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    bool plots = false;
    std::size_t threads = 1;
    std::optional<std::string> out;
    std::optional<std::string> individual;
};

CLI::App* add_command(CLI::App& app, const char* name, const char* description, CommonFlags& flags) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", flags.config, "JSON config file (defaults apply when omitted)");
    sub->add_option("--seed", flags.seed, "master seed, overrides the config");
    sub->add_flag("--plots", flags.plots, "also write SVG figures");
    sub->add_option("--threads", flags.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", flags.out, "output root (default: config output_dir, $DYNLAB_OUT, ./runs)");
    return sub;
}

} // namespace

int main(int argc, char** argv) {
    using namespace dynlab;
    using namespace dynlab::app;

    CLI::App app{"Agent-environment dynamics lab: simulate, learn, evolve and score controllers"};
    app.require_subcommand(1);
    CommonFlags flags;
    CLI::App* simulate = add_command(app, "simulate", "uncontrolled CTRNN + particle rollout", flags);
    CLI::App* learn = add_command(app, "learn", "paired runs with and without online learning", flags);
    CLI::App* evolve = add_command(app, "evolve", "island-model evolution of symbolic controllers", flags);
    CLI::App* eval_expr = add_command(app, "eval-expr", "score a stored symbolic controller", flags);
    eval_expr->add_option("--individual", flags.individual, "s-expression file, overrides the config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        ExperimentConfig config =
            flags.config.empty() ? config_from_json(nlohmann::json::object()) : load_config(flags.config);
        if (flags.seed) config.master_seed = *flags.seed;
        if (flags.individual) config.eval_expr.individual = *flags.individual;
        RunOptions opts;
        opts.out_root = resolve_out_root(flags.out, config);
        opts.plots = flags.plots;
        opts.threads = flags.threads;

        if (simulate->parsed()) return cmd_simulate(config, opts);
        if (learn->parsed()) return cmd_learn(config, opts);
        if (evolve->parsed()) return cmd_evolve(config, opts);
        return cmd_eval_expr(config, opts);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const NonFiniteState& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return kNumericFailure;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return kParseFailure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailure;
    }
}
