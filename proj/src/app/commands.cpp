#include "dynlab/app/commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "dynlab/app/svg.hpp"
#include "dynlab/csv.hpp"
#include "dynlab/dgp/evolution.hpp"
#include "dynlab/dgp/sexpr.hpp"
#include "dynlab/errors.hpp"
#include "dynlab/experiments.hpp"

namespace dynlab::app {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path run_directory(const fs::path& root, const std::string& command, std::uint64_t seed) {
    return root / (command + "-seed" + std::to_string(seed));
}

fs::path resolve_out_root(const std::optional<std::string>& flag, const ExperimentConfig& config) {
    if (flag && !flag->empty()) return *flag;
    if (!config.output_dir.empty()) return config.output_dir;
    if (const char* env = std::getenv("DYNLAB_OUT"); env && *env) return env;
    return "runs";
}

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

fs::path prepare_run(const std::string& command, const ExperimentConfig& config, const RunOptions& opts) {
    const fs::path dir = run_directory(opts.out_root, command, config.master_seed);
    fs::create_directories(dir);
    json manifest = config_to_json(config);
    manifest["command"] = command;
    open_out(dir / "manifest.json") << manifest.dump(2) << '\n';
    return dir;
}

void write_json(const fs::path& path, const json& j) { open_out(path) << j.dump(2) << '\n'; }

/// JSON has no infinities; non-finite values are written as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::shared_ptr<const StochasticDoubleIntegrator> make_env(const ExperimentConfig& c) {
    return std::make_shared<const StochasticDoubleIntegrator>(c.sdi, c.weights);
}

CtrnnDims sdi_ctrnn_dims(const ExperimentConfig& c) { return {c.ctrnn_dims.neurons, 2, 1}; }

std::vector<std::string> indexed(const std::string& prefix, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i + 1));
    return out;
}

std::vector<std::string> parameter_names(const CtrnnDims& d) {
    std::vector<std::string> names = indexed("tau", d.neurons);
    for (auto& n : indexed("b", d.neurons)) names.push_back(n);
    auto matrix = [&](const std::string& p, std::size_t rows, std::size_t cols) {
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) names.push_back(p + std::to_string(r + 1) + std::to_string(c + 1));
    };
    matrix("A", d.neurons, d.neurons);
    matrix("B", d.neurons, d.observations);
    matrix("C", d.controls, d.neurons);
    return names;
}

/// Running left-rectangle return: value at t_i covers [0, t_i).
std::vector<double> cumulative_return(const RolloutRecord& rec, const ReturnConfig& rc) {
    const auto& t = rec.trajectory.times;
    std::vector<double> out(t.size(), 0.0);
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double w = rc.discount_rate == 0.0 ? 1.0 : std::exp(-rc.discount_rate * t[i - 1]);
        out[i] = out[i - 1] + w * rec.rewards[i - 1] * (t[i] - t[i - 1]);
    }
    return out;
}

/// Value i of a per-step series, NaN past the end of a truncated run.
double at(const std::vector<double>& v, std::size_t i) {
    return i < v.size() ? v[i] : std::numeric_limits<double>::quiet_NaN();
}

void write_rollout_csv(const fs::path& path, const RolloutRecord& rec, std::size_t agent_dim,
                       const std::string& agent_prefix) {
    std::ofstream out = open_out(path);
    CsvWriter csv(out);
    std::vector<std::string> header{"t"};
    for (auto& n : indexed(agent_prefix, agent_dim)) header.push_back(n);
    header.insert(header.end(), {"s1", "s2", "u", "r"});
    csv.header(header);
    std::vector<double> row;
    for (std::size_t i = 0; i < rec.trajectory.size(); ++i) {
        row.assign({rec.trajectory.times[i]});
        row.insert(row.end(), rec.trajectory.states[i].begin(), rec.trajectory.states[i].end());
        row.push_back(rec.controls[i][0]);
        row.push_back(rec.rewards[i]);
        csv.row(row);
    }
}

} // namespace

int cmd_simulate(const ExperimentConfig& config, const RunOptions& opts) {
    const fs::path dir = prepare_run("simulate", config, opts);
    const CtrnnDims dims = sdi_ctrnn_dims(config);
    const ClosedLoop loop = ctrnn_closed_loop(init_params(dims, config.kappa), make_env(config));
    const RolloutRecord rec =
        rollout(loop, config.solver, config.simulate.returns, SeedKey{config.master_seed, 0x5151ULL});

    write_rollout_csv(dir / "trajectory.csv", rec, dims.neurons, "alpha");
    write_json(dir / "summary.json",
               {{"master_seed", config.master_seed},
                {"return", number(rec.return_)},
                {"final_abs_s1", number(final_window_abs_position(rec.trajectory, config.simulate.returns.horizon))},
                {"recorded_steps", rec.trajectory.size()}});
    if (opts.plots) {
        std::vector<double> s1, s2;
        for (const auto& x : rec.trajectory.states) {
            s1.push_back(x[dims.neurons]);
            s2.push_back(x[dims.neurons + 1]);
        }
        write_line_plot(dir / "trajectory.svg", "Uncontrolled particle", "t", rec.trajectory.times,
                        {{"position s1", s1}, {"velocity s2", s2}});
    }
    std::printf("simulate: return %.6g, output in %s\n", rec.return_, dir.c_str());
    return kOk;
}

int cmd_learn(const ExperimentConfig& config, const RunOptions& opts) {
    const fs::path dir = prepare_run("learn", config, opts);
    LearningSetup setup;
    setup.dims = sdi_ctrnn_dims(config);
    setup.kappa = config.kappa;
    setup.sdi = config.sdi;
    setup.weights = config.weights;
    setup.hyper = config.oua;
    setup.solver = config.solver;
    setup.returns = config.learn.returns;

    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < config.learn.n_seeds; ++i) seeds.push_back(config.master_seed + i);
    const ComparisonReport report = compare_learning(setup, seeds, config.learn.learning, opts.threads);

    const LearningTrace& on = report.learning_trace;
    const LearningTrace& off = report.baseline_trace;
    const std::vector<double>& times =
        on.record.trajectory.size() >= off.record.trajectory.size() ? on.record.trajectory.times
                                                                    : off.record.trajectory.times;
    const std::size_t n = times.size();
    auto column = [](const LearningTrace& tr, auto&& fn) {
        std::vector<double> v;
        for (std::size_t i = 0; i < tr.record.trajectory.size(); ++i) v.push_back(fn(tr, i));
        return v;
    };
    const auto s1_on = column(on, [](const LearningTrace& tr, std::size_t i) { return tr.position(i); });
    const auto s1_off = column(off, [](const LearningTrace& tr, std::size_t i) { return tr.position(i); });
    const auto s2_on = column(on, [](const LearningTrace& tr, std::size_t i) { return tr.velocity(i); });
    const auto s2_off = column(off, [](const LearningTrace& tr, std::size_t i) { return tr.velocity(i); });
    const auto ret_on = cumulative_return(on.record, setup.returns);
    const auto ret_off = cumulative_return(off.record, setup.returns);

    auto paired = [&](const fs::path& path, const std::string& name, const std::vector<double>& a,
                      const std::vector<double>& b) {
        std::ofstream out = open_out(path);
        CsvWriter csv(out);
        csv.header({"t", name + "_learning", name + "_no_learning"});
        for (std::size_t i = 0; i < n; ++i) csv.row(std::vector<double>{times[i], at(a, i), at(b, i)});
    };
    paired(dir / "panel_a_position.csv", "s1", s1_on, s1_off);
    paired(dir / "panel_b_velocity.csv", "s2", s2_on, s2_off);
    paired(dir / "panel_c_return.csv", "return", ret_on, ret_off);

    const std::size_t k = setup.dims.neurons;
    const std::size_t n_on = on.record.trajectory.size();
    {
        std::ofstream out = open_out(dir / "panel_d_alpha.csv");
        CsvWriter csv(out);
        std::vector<std::string> header{"t"};
        for (auto& name : indexed("alpha", k)) header.push_back(name);
        csv.header(header);
        for (std::size_t i = 0; i < n_on; ++i) {
            std::vector<double> row{on.record.trajectory.times[i]};
            for (double a : on.alpha(i)) row.push_back(a);
            csv.row(row);
        }
    }
    const std::vector<std::string> pnames = parameter_names(setup.dims);
    {
        std::ofstream out = open_out(dir / "panel_e_theta.csv");
        CsvWriter csv(out);
        std::vector<std::string> header{"t"};
        for (auto& p : pnames) header.push_back("theta_" + p);
        for (auto& p : pnames) header.push_back("mu_" + p);
        csv.header(header);
        for (std::size_t i = 0; i < n_on; ++i) {
            std::vector<double> row{on.record.trajectory.times[i]};
            for (double v : on.theta(i)) row.push_back(v);
            for (double v : on.mu(i)) row.push_back(v);
            csv.row(row);
        }
    }
    {
        std::ofstream out = open_out(dir / "panel_f_reward.csv");
        CsvWriter csv(out);
        csv.header({"t", "u", "r", "nu", "delta"});
        for (std::size_t i = 0; i < n_on; ++i)
            csv.row(std::vector<double>{on.record.trajectory.times[i], on.record.controls[i][0], on.record.rewards[i],
                                        on.nu[i], on.delta[i]});
    }
    {
        std::ofstream out = open_out(dir / "comparison.csv");
        CsvWriter csv(out);
        csv.header({"seed", "return_learning", "return_no_learning", "final_abs_s1_learning",
                    "final_abs_s1_no_learning", "diverged_learning", "diverged_at_learning", "diverged_no_learning",
                    "diverged_at_no_learning", "tau_clamped_steps"});
        for (const SeedComparison& s : report.seeds)
            csv.row(std::vector<double>{static_cast<double>(s.seed), s.learning.return_, s.baseline.return_,
                                        s.learning.final_abs_s1, s.baseline.final_abs_s1,
                                        s.learning.diverged ? 1.0 : 0.0, s.learning.diverged_at,
                                        s.baseline.diverged ? 1.0 : 0.0, s.baseline.diverged_at,
                                        static_cast<double>(s.learning.tau_clamped_steps)});
    }
    write_json(dir / "summary.json",
               {{"master_seed", config.master_seed},
                {"n_seeds", report.seeds.size()},
                {"learning_wins", report.learning_wins()},
                {"diverged_runs", report.diverged_runs()},
                {"median_return_learning", number(report.median_return(true))},
                {"median_return_no_learning", number(report.median_return(false))},
                {"median_final_abs_s1_learning", number(report.median_final_abs_s1(true))},
                {"median_final_abs_s1_no_learning", number(report.median_final_abs_s1(false))}});

    if (opts.plots) {
        write_line_plot(dir / "panel_a_position.svg", "Position", "t", times,
                        {{"learning", s1_on}, {"no learning", s1_off}});
        write_line_plot(dir / "panel_b_velocity.svg", "Velocity", "t", times,
                        {{"learning", s2_on}, {"no learning", s2_off}});
        write_line_plot(dir / "panel_c_return.svg", "Cumulative return", "t", times,
                        {{"learning", ret_on}, {"no learning", ret_off}});
        std::vector<Series> alpha(k), theta(pnames.size());
        for (std::size_t j = 0; j < k; ++j) alpha[j].label = "alpha" + std::to_string(j + 1);
        for (std::size_t j = 0; j < pnames.size(); ++j) theta[j].label = pnames[j];
        for (std::size_t i = 0; i < n_on; ++i) {
            for (std::size_t j = 0; j < k; ++j) alpha[j].y.push_back(on.alpha(i)[j]);
            for (std::size_t j = 0; j < pnames.size(); ++j) theta[j].y.push_back(on.theta(i)[j]);
        }
        write_line_plot(dir / "panel_d_alpha.svg", "Neuron states", "t", on.record.trajectory.times, alpha);
        write_line_plot(dir / "panel_e_theta.svg", "Parameters", "t", on.record.trajectory.times, theta);
        write_line_plot(dir / "panel_f_reward.svg", "Reward, estimate and prediction error", "t",
                        on.record.trajectory.times,
                        {{"r", on.record.rewards}, {"nu", on.nu}, {"delta", on.delta}});
    }

    std::printf("learn: learning beat no learning in %zu/%zu seeds, output in %s\n", report.learning_wins(),
                report.seeds.size(), dir.c_str());
    if (report.diverged_runs() > 0) {
        std::fprintf(stderr, "learn: %zu run(s) produced a non-finite state; see comparison.csv\n",
                     report.diverged_runs());
        return kNumericFailure;
    }
    return kOk;
}

int cmd_evolve(const ExperimentConfig& config, const RunOptions& opts) {
    const fs::path dir = prepare_run("evolve", config, opts);
    const dgp::FitnessSetup setup{make_env(config), config.solver, config.evolve.returns, config.gp.penalty_fitness,
                                  config.gp.tanh_readout};
    const dgp::AgentShape shape{};
    const dgp::EvolutionReport report = dgp::run_dgp(config.gp, shape, setup, config.master_seed, opts.threads);

    {
        std::ofstream out = open_out(dir / "fitness.csv");
        CsvWriter csv(out);
        csv.header({"generation", "island", "best_fitness", "mean_fitness"});
        for (const dgp::IslandStats& s : report.stats)
            csv.row(std::vector<double>{static_cast<double>(s.generation), static_cast<double>(s.island),
                                        s.best_fitness, s.mean_fitness});
    }
    fs::create_directories(dir / "best");
    for (std::size_t g = 0; g < report.best_per_generation.size(); ++g) {
        char name[32];
        std::snprintf(name, sizeof name, "gen_%03zu.sexpr", g);
        const dgp::Individual& best = report.best_per_generation[g];
        open_out(dir / "best" / name) << "# generation " << g << " fitness " << format_real(*best.fitness) << '\n'
                                      << dgp::serialize_individual(best);
    }
    open_out(dir / "best_individual.sexpr") << dgp::serialize_individual(report.final_best);

    const auto last_seeds = dgp::generation_seeds(config.master_seed, config.gp.n_generations,
                                                  config.gp.rollouts_per_eval);
    dgp::Individual null_agent = dgp::null_individual(shape);
    const double null_fitness = dgp::evaluate_fitness(null_agent, setup, last_seeds);
    write_json(dir / "summary.json",
               {{"master_seed", config.master_seed},
                {"generations", config.gp.n_generations},
                {"initial_max_fitness", number(report.max_fitness(0))},
                {"final_max_fitness", number(report.max_fitness(config.gp.n_generations))},
                {"final_best_fitness", number(*report.final_best.fitness)},
                {"final_best_nodes", report.final_best.node_count()},
                {"null_fitness", number(null_fitness)}});

    if (opts.plots) {
        std::vector<double> gens, best;
        std::vector<Series> islands(config.gp.n_islands);
        for (std::size_t i = 0; i < islands.size(); ++i) islands[i].label = "island " + std::to_string(i);
        for (std::size_t g = 0; g <= config.gp.n_generations; ++g) {
            gens.push_back(static_cast<double>(g));
            best.push_back(report.max_fitness(g));
        }
        for (const dgp::IslandStats& s : report.stats) islands[s.island].y.push_back(s.best_fitness);
        islands.insert(islands.begin(), Series{"max", best});
        write_line_plot(dir / "fitness.svg", "Best fitness per generation", "generation", gens, islands);
    }
    std::printf("evolve: max fitness %.6g -> %.6g, output in %s\n", report.max_fitness(0),
                report.max_fitness(config.gp.n_generations), dir.c_str());
    return kOk;
}

int cmd_eval_expr(const ExperimentConfig& config, const RunOptions& opts) {
    if (config.eval_expr.individual.empty())
        throw ConfigError("eval-expr needs an individual file (eval_expr.individual or --individual)");
    std::ifstream in(config.eval_expr.individual, std::ios::binary);
    if (!in) throw ConfigError("cannot open individual file " + config.eval_expr.individual);
    std::ostringstream text;
    text << in.rdbuf();
    const dgp::Individual ind = dgp::parse_individual(text.str());

    const fs::path dir = prepare_run("eval-expr", config, opts);
    const auto env = make_env(config);
    const dgp::FitnessSetup setup{env, config.solver, config.eval_expr.returns, config.gp.penalty_fitness,
                                  config.gp.tanh_readout};
    const dgp::Individual null_agent = dgp::null_individual(dgp::AgentShape{ind.dim_state(), env->dim_obs()});
    // Fail on dimension problems before any rollout runs.
    dgp::individual_to_system(ind, env, setup.tanh_readout);

    const std::size_t n = config.eval_expr.rollouts;
    const SeedKey base{config.master_seed, 0xe7a1ULL};
    std::vector<RolloutRecord> runs(n), null_runs(n);
    for (std::size_t r = 0; r < n; ++r) {
        runs[r] = dgp::rollout_individual(ind, setup, base.child(r));
        null_runs[r] = dgp::rollout_individual(null_agent, setup, base.child(r));
    }
    auto clamp = [&](double v) { return std::isfinite(v) ? std::max(v, setup.penalty) : setup.penalty; };
    double mean = 0.0, null_mean = 0.0;
    std::size_t diverged = 0;
    {
        std::ofstream out = open_out(dir / "per_seed.csv");
        CsvWriter csv(out);
        csv.header({"rollout", "return", "null_return", "diverged"});
        for (std::size_t r = 0; r < n; ++r) {
            const double a = clamp(runs[r].return_), b = clamp(null_runs[r].return_);
            mean += a / static_cast<double>(n);
            null_mean += b / static_cast<double>(n);
            diverged += runs[r].diverged ? 1 : 0;
            csv.row(std::vector<double>{static_cast<double>(r), a, b, runs[r].diverged ? 1.0 : 0.0});
        }
    }
    write_rollout_csv(dir / "rollout.csv", runs[0], ind.dim_state(), "z");
    write_rollout_csv(dir / "null_rollout.csv", null_runs[0], ind.dim_state(), "z");

    json summary{{"master_seed", config.master_seed},
                 {"individual", config.eval_expr.individual},
                 {"rollouts", n},
                 {"mean_return", number(mean)},
                 {"null_mean_return", number(null_mean)},
                 {"beats_null", mean > null_mean},
                 {"diverged_rollouts", diverged}};
    if (config.eval_expr.n_env > 0) {
        const SdiDistribution dist;
        const auto score = [&](const dgp::Individual& agent) {
            return evaluate_intelligence(individual_episode(agent, config.solver, config.eval_expr.returns,
                                                            setup.penalty, setup.tanh_readout),
                                         dist, config.eval_expr.n_env, 1, config.master_seed, opts.threads)
                .score;
        };
        summary["intelligence"] = number(score(ind));
        summary["null_intelligence"] = number(score(null_agent));
    }
    write_json(dir / "summary.json", summary);

    if (opts.plots) {
        std::vector<double> s1, s1_null;
        const std::size_t k = ind.dim_state();
        for (const auto& x : runs[0].trajectory.states) s1.push_back(x[k]);
        for (const auto& x : null_runs[0].trajectory.states) s1_null.push_back(x[k]);
        const auto& times = runs[0].trajectory.size() >= null_runs[0].trajectory.size()
                                ? runs[0].trajectory.times
                                : null_runs[0].trajectory.times;
        write_line_plot(dir / "rollout.svg", "Position, first rollout", "t", times,
                        {{"individual", s1}, {"null controller", s1_null}});
    }
    std::printf("eval-expr: mean return %.6g vs null %.6g, output in %s\n", mean, null_mean, dir.c_str());
    return kOk;
}

} // namespace dynlab::app
