#include "dynlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dynlab/dgp/evolution.hpp"
#include "dynlab/errors.hpp"
#include "dynlab/parallel.hpp"

namespace dynlab {

ClosedLoop ctrnn_closed_loop(const CtrnnParams& params, std::shared_ptr<const Environment> env) {
    if (!env) throw std::invalid_argument("ctrnn_closed_loop: null environment");
    params.validate();
    const CtrnnDims dims = params.dims();
    if (dims.observations != env->dim_obs() || dims.controls != env->dim_ctrl())
        throw DimensionMismatch("CTRNN dims do not match the environment");
    const std::size_t k = dims.neurons;

    ClosedLoop out;
    out.dynamics = couple(
        ctrnn_system(params), environment_system(env),
        [env](std::span<const double> s, std::span<double> y) { env->observe(s, y); },
        [params](std::span<const double> alpha, std::span<double> u) { readout(alpha, params, u); });
    out.x0.assign(k, 0.0);
    const StateVector s0 = env->initial_state();
    out.x0.insert(out.x0.end(), s0.begin(), s0.end());
    out.tap.dim_ctrl = dims.controls;
    out.tap.fn = [env, params, k](std::span<const double> x, std::span<double> u) {
        readout(x.first(k), params, u);
        return env->reward(x.subspan(k), u);
    };
    return out;
}

EpisodeFn ctrnn_episode(CtrnnParams params, SolverConfig solver, ReturnConfig returns, DivergencePolicy policy) {
    return [params = std::move(params), solver, returns, policy](std::shared_ptr<const Environment> env,
                                                                 SeedKey seed) {
        return rollout(ctrnn_closed_loop(params, std::move(env)), solver, returns, seed, policy).return_;
    };
}

EpisodeFn individual_episode(dgp::Individual ind, SolverConfig solver, ReturnConfig returns, double penalty,
                             bool tanh_readout) {
    return [ind = std::move(ind), solver, returns, penalty, tanh_readout](std::shared_ptr<const Environment> env,
                                                                          SeedKey seed) {
        dgp::FitnessSetup setup{std::move(env), solver, returns, penalty, tanh_readout};
        const double r = dgp::rollout_individual(ind, setup, seed).return_;
        return std::isfinite(r) ? std::max(r, penalty) : penalty;
    };
}

IntelligenceReport evaluate_intelligence(const EpisodeFn& episode, const SdiDistribution& dist, std::size_t n_env,
                                         std::size_t rollouts_per_env, std::uint64_t master_seed,
                                         std::size_t threads) {
    if (n_env == 0) throw std::invalid_argument("evaluate_intelligence needs at least one environment");
    if (rollouts_per_env == 0) throw std::invalid_argument("evaluate_intelligence needs at least one rollout");

    std::vector<std::shared_ptr<const StochasticDoubleIntegrator>> envs;
    envs.reserve(n_env);
    for (std::size_t e = 0; e < n_env; ++e) {
        std::mt19937_64 rng = make_engine(SeedKey{master_seed, 0xe4'0001ULL}.child(e));
        envs.push_back(std::make_shared<const StochasticDoubleIntegrator>(dist.sample(rng)));
    }

    IntelligenceReport report;
    report.per_env.resize(n_env);
    for (std::size_t e = 0; e < n_env; ++e) {
        report.per_env[e].params = envs[e]->params();
        report.per_env[e].returns.resize(rollouts_per_env);
    }
    const SeedKey noise{master_seed, 0xe4'0002ULL};
    parallel_for(n_env * rollouts_per_env, threads, [&](std::size_t t) {
        const std::size_t e = t / rollouts_per_env, r = t % rollouts_per_env;
        report.per_env[e].returns[r] = episode(envs[e], noise.child(e).child(r));
    });

    double total = 0.0;
    for (EnvironmentScore& s : report.per_env) {
        double sum = 0.0;
        for (double r : s.returns) sum += r;
        s.mean = sum / static_cast<double>(s.returns.size());
        total += s.mean;
    }
    report.score = total / static_cast<double>(n_env);
    return report;
}

void LearningSetup::validate() const {
    if (dims.neurons == 0 || dims.observations == 0 || dims.controls == 0)
        throw std::invalid_argument("CTRNN dimensions must be at least 1");
    if (!(kappa >= 0.0)) throw std::invalid_argument("kappa must be non-negative");
    sdi.validate();
    weights.validate();
    hyper.validate();
    solver.validate();
    returns.validate();
}

OuaHyper without_learning(OuaHyper h) {
    h.eta = 0.0;
    h.sigma = 0.0;
    return h;
}

std::span<const double> LearningTrace::alpha(std::size_t i) const {
    return std::span<const double>(record.trajectory.states[i]).subspan(layout.alpha_offset(), layout.dims.neurons);
}

std::span<const double> LearningTrace::theta(std::size_t i) const {
    return std::span<const double>(record.trajectory.states[i]).subspan(layout.theta_offset(), layout.n_params);
}

std::span<const double> LearningTrace::mu(std::size_t i) const {
    return std::span<const double>(record.trajectory.states[i]).subspan(layout.mu_offset(), layout.n_params);
}

double final_window_abs_position(const Trajectory& traj, double horizon) {
    const double start = 0.8 * horizon - 1e-9 * horizon;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (traj.times[i] < start) continue;
        sum += std::abs(traj.states[i][0]);
        ++count;
    }
    return count == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(count);
}

namespace {

struct ArmRun {
    ArmResult result;
    LearningTrace trace;
};

ArmRun run_arm(const LearningSetup& setup, const OuaHyper& hyper, SeedKey noise, bool keep_trace) {
    auto env = std::make_shared<const StochasticDoubleIntegrator>(setup.sdi, setup.weights);
    const LearningSystem sys(setup.dims, setup.kappa, env, hyper);
    RewardTap tap;
    tap.dim_ctrl = setup.dims.controls;
    tap.fn = [&sys](std::span<const double> x, std::span<double> u) {
        const LearningTap t = sys.tap(x);
        std::copy(t.u.begin(), t.u.end(), u.begin());
        return t.r;
    };
    const StateVector x0 = sys.initial_state(init_params(setup.dims, setup.kappa));
    RolloutRecord rec = rollout(sys.dynamics(), x0, setup.solver, setup.returns, tap, noise,
                                DivergencePolicy{-std::numeric_limits<double>::infinity()});

    ArmRun run;
    run.result.return_ = rec.return_;
    run.result.diverged = rec.diverged;
    run.result.diverged_at = rec.diverged_at;
    run.result.final_abs_s1 = rec.diverged ? std::numeric_limits<double>::infinity()
                                           : final_window_abs_position(rec.trajectory, setup.returns.horizon);

    const LearningLayout& layout = sys.layout();
    std::vector<double> nu, delta;
    if (keep_trace) {
        nu.reserve(rec.trajectory.size());
        delta.reserve(rec.trajectory.size());
    }
    for (std::size_t i = 0; i < rec.trajectory.size(); ++i) {
        const StateVector& x = rec.trajectory.states[i];
        bool clamped = false;
        sys.network_at(x, &clamped);
        if (clamped) ++run.result.tau_clamped_steps;
        if (keep_trace) {
            nu.push_back(x[layout.nu_index()]);
            delta.push_back(rpe(rec.rewards[i], x[layout.nu_index()]));
        }
    }
    if (keep_trace) run.trace = LearningTrace{layout, std::move(rec), std::move(nu), std::move(delta)};
    return run;
}

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

ComparisonReport compare_learning(const LearningSetup& setup, std::span<const std::uint64_t> seeds,
                                  bool learning_on, std::size_t threads) {
    if (seeds.empty()) throw std::invalid_argument("compare_learning needs at least one seed");
    setup.validate();
    const OuaHyper off = without_learning(setup.hyper);
    const OuaHyper on = learning_on && setup.hyper.eta > 0.0 ? setup.hyper : off;

    ComparisonReport report;
    report.seeds.resize(seeds.size());
    parallel_for(2 * seeds.size(), threads, [&](std::size_t t) {
        const std::size_t i = t / 2;
        const bool learning = t % 2 == 0;
        const SeedKey noise{seeds[i], 0x1ea7ULL};
        ArmRun run = run_arm(setup, learning ? on : off, noise, i == 0);
        SeedComparison& slot = report.seeds[i];
        slot.seed = seeds[i];
        (learning ? slot.learning : slot.baseline) = run.result;
        if (i == 0) (learning ? report.learning_trace : report.baseline_trace) = std::move(run.trace);
    });
    return report;
}

std::size_t ComparisonReport::learning_wins() const {
    return static_cast<std::size_t>(std::count_if(seeds.begin(), seeds.end(), [](const SeedComparison& s) {
        return s.learning.return_ > s.baseline.return_;
    }));
}

std::size_t ComparisonReport::diverged_runs() const {
    std::size_t n = 0;
    for (const SeedComparison& s : seeds) n += (s.learning.diverged ? 1 : 0) + (s.baseline.diverged ? 1 : 0);
    return n;
}

double ComparisonReport::median_return(bool learning) const {
    std::vector<double> v;
    for (const SeedComparison& s : seeds) v.push_back(learning ? s.learning.return_ : s.baseline.return_);
    return median(std::move(v));
}

double ComparisonReport::median_final_abs_s1(bool learning) const {
    std::vector<double> v;
    for (const SeedComparison& s : seeds) v.push_back(learning ? s.learning.final_abs_s1 : s.baseline.final_abs_s1);
    return median(std::move(v));
}

} // namespace dynlab
