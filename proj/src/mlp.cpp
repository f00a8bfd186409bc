#include "chaossep/mlp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <stdexcept>
#include <thread>

#include "chaossep/rates.hpp"
#include "chaossep/rng.hpp"
#include "chaossep/separation.hpp"

namespace chaossep {

namespace {

std::vector<double> uniform_grid(double lo, double hi, int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        xs[static_cast<std::size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return xs;
}

/// Reusable buffers for batched forward/backward passes. Activations are
/// unit-major: act[layer][j * n + s].
struct Workspace {
    std::vector<std::vector<double>> act;  // post-activation per hidden layer
    std::vector<double> out;
    std::vector<double> d_cur, d_prev;

    void resize(const MlpModel& m, std::size_t n) {
        act.assign(static_cast<std::size_t>(m.depth), {});
        for (auto& a : act) a.assign(static_cast<std::size_t>(m.width) * n, 0.0);
        out.assign(n, 0.0);
        d_cur.assign(static_cast<std::size_t>(m.width) * n, 0.0);
        d_prev.assign(static_cast<std::size_t>(m.width) * n, 0.0);
    }
};

void forward_batch(const MlpModel& m, std::span<const double> xs, Workspace& ws) {
    const std::size_t n = xs.size();
    const int u = m.width;
    // first hidden layer from the scalar input
    {
        const auto& w = m.weights[0];
        const auto& b = m.biases[0];
        auto& a = ws.act[0];
        for (int j = 0; j < u; ++j) {
            const double wj = w[static_cast<std::size_t>(j)];
            const double bj = b[static_cast<std::size_t>(j)];
            double* row = a.data() + static_cast<std::size_t>(j) * n;
            for (std::size_t s = 0; s < n; ++s)
                row[s] = std::max(0.0, wj * xs[s] + bj);
        }
    }
    for (int k = 1; k < m.depth; ++k) {
        const auto& w = m.weights[static_cast<std::size_t>(k)];
        const auto& b = m.biases[static_cast<std::size_t>(k)];
        const auto& prev = ws.act[static_cast<std::size_t>(k - 1)];
        auto& a = ws.act[static_cast<std::size_t>(k)];
        for (int j = 0; j < u; ++j) {
            double* row = a.data() + static_cast<std::size_t>(j) * n;
            const double bj = b[static_cast<std::size_t>(j)];
            for (std::size_t s = 0; s < n; ++s) row[s] = bj;
            for (int i = 0; i < u; ++i) {
                const double wji = w[static_cast<std::size_t>(j * u + i)];
                const double* prow = prev.data() + static_cast<std::size_t>(i) * n;
                for (std::size_t s = 0; s < n; ++s) row[s] += wji * prow[s];
            }
            for (std::size_t s = 0; s < n; ++s) row[s] = std::max(0.0, row[s]);
        }
    }
    {
        const auto& w = m.weights[static_cast<std::size_t>(m.depth)];
        const double b = m.biases[static_cast<std::size_t>(m.depth)][0];
        const auto& last = ws.act[static_cast<std::size_t>(m.depth - 1)];
        for (std::size_t s = 0; s < n; ++s) ws.out[s] = b;
        for (int i = 0; i < u; ++i) {
            const double wi = w[static_cast<std::size_t>(i)];
            const double* prow = last.data() + static_cast<std::size_t>(i) * n;
            for (std::size_t s = 0; s < n; ++s) ws.out[s] += wi * prow[s];
        }
    }
}

double loss_from_out(const Workspace& ws, std::span<const double> targets) {
    double acc = 0.0;
    for (std::size_t s = 0; s < targets.size(); ++s) {
        const double d = ws.out[s] - targets[s];
        acc += d * d;
    }
    return acc / static_cast<double>(targets.size());
}

void backward_batch(const MlpModel& m, std::span<const double> xs,
                    std::span<const double> targets, Workspace& ws,
                    MlpGradients& g) {
    const std::size_t n = xs.size();
    const int u = m.width;
    const double inv_n = 1.0 / static_cast<double>(n);

    for (auto& gw : g.weights) std::fill(gw.begin(), gw.end(), 0.0);
    for (auto& gb : g.biases) std::fill(gb.begin(), gb.end(), 0.0);

    // output layer
    {
        auto& gw = g.weights[static_cast<std::size_t>(m.depth)];
        auto& gb = g.biases[static_cast<std::size_t>(m.depth)];
        const auto& w = m.weights[static_cast<std::size_t>(m.depth)];
        const auto& last = ws.act[static_cast<std::size_t>(m.depth - 1)];
        // d_out[s] lives implicitly in ws.out after this loop
        for (std::size_t s = 0; s < n; ++s)
            ws.out[s] = 2.0 * (ws.out[s] - targets[s]) * inv_n;
        double gbacc = 0.0;
        for (std::size_t s = 0; s < n; ++s) gbacc += ws.out[s];
        gb[0] = gbacc;
        for (int i = 0; i < u; ++i) {
            const double* prow = last.data() + static_cast<std::size_t>(i) * n;
            double acc = 0.0;
            for (std::size_t s = 0; s < n; ++s) acc += ws.out[s] * prow[s];
            gw[static_cast<std::size_t>(i)] = acc;
            double* drow = ws.d_cur.data() + static_cast<std::size_t>(i) * n;
            const double wi = w[static_cast<std::size_t>(i)];
            for (std::size_t s = 0; s < n; ++s) drow[s] = wi * ws.out[s];
        }
    }

    for (int k = m.depth - 1; k >= 0; --k) {
        const auto& a = ws.act[static_cast<std::size_t>(k)];
        auto& gw = g.weights[static_cast<std::size_t>(k)];
        auto& gb = g.biases[static_cast<std::size_t>(k)];
        const int fan_in = m.fan_in(k);

        // ReLU mask: post-activation is positive exactly where the
        // pre-activation was.
        for (int j = 0; j < u; ++j) {
            double* drow = ws.d_cur.data() + static_cast<std::size_t>(j) * n;
            const double* arow = a.data() + static_cast<std::size_t>(j) * n;
            for (std::size_t s = 0; s < n; ++s)
                if (arow[s] <= 0.0) drow[s] = 0.0;
        }

        if (k == 0) {
            for (int j = 0; j < u; ++j) {
                const double* drow = ws.d_cur.data() + static_cast<std::size_t>(j) * n;
                double gacc = 0.0, bacc = 0.0;
                for (std::size_t s = 0; s < n; ++s) {
                    gacc += drow[s] * xs[s];
                    bacc += drow[s];
                }
                gw[static_cast<std::size_t>(j)] = gacc;
                gb[static_cast<std::size_t>(j)] = bacc;
            }
            break;
        }

        const auto& prev = ws.act[static_cast<std::size_t>(k - 1)];
        const auto& w = m.weights[static_cast<std::size_t>(k)];
        std::fill(ws.d_prev.begin(), ws.d_prev.end(), 0.0);
        for (int j = 0; j < u; ++j) {
            const double* drow = ws.d_cur.data() + static_cast<std::size_t>(j) * n;
            double bacc = 0.0;
            for (std::size_t s = 0; s < n; ++s) bacc += drow[s];
            gb[static_cast<std::size_t>(j)] = bacc;
            for (int i = 0; i < fan_in; ++i) {
                const double* prow = prev.data() + static_cast<std::size_t>(i) * n;
                double gacc = 0.0;
                for (std::size_t s = 0; s < n; ++s) gacc += drow[s] * prow[s];
                gw[static_cast<std::size_t>(j * fan_in + i)] = gacc;
                const double wji = w[static_cast<std::size_t>(j * fan_in + i)];
                double* dprow = ws.d_prev.data() + static_cast<std::size_t>(i) * n;
                for (std::size_t s = 0; s < n; ++s) dprow[s] += wji * drow[s];
            }
        }
        std::swap(ws.d_cur, ws.d_prev);
    }
}

MlpGradients make_gradients_like(const MlpModel& m) {
    MlpGradients g;
    g.weights.reserve(m.weights.size());
    g.biases.reserve(m.biases.size());
    for (const auto& w : m.weights) g.weights.emplace_back(w.size(), 0.0);
    for (const auto& b : m.biases) g.biases.emplace_back(b.size(), 0.0);
    return g;
}

}  // namespace

std::size_t MlpModel::param_count() const {
    std::size_t n = 0;
    for (const auto& w : weights) n += w.size();
    for (const auto& b : biases) n += b.size();
    return n;
}

bool MlpModel::finite() const {
    for (const auto& w : weights)
        for (double v : w)
            if (!std::isfinite(v)) return false;
    for (const auto& b : biases)
        for (double v : b)
            if (!std::isfinite(v)) return false;
    return true;
}

MlpModel mlp_init(int depth, int width, std::uint64_t seed) {
    if (depth < 1 || width < 1)
        throw std::invalid_argument("mlp_init: depth and width must be >= 1");
    MlpModel m;
    m.depth = depth;
    m.width = width;
    m.seed = seed;
    Rng rng(seed);
    for (int k = 0; k <= depth; ++k) {
        const int fi = m.fan_in(k), fo = m.fan_out(k);
        const double limit = std::sqrt(6.0 / static_cast<double>(fi + fo));
        std::vector<double> w(static_cast<std::size_t>(fi) * static_cast<std::size_t>(fo));
        for (double& v : w) v = rng.uniform(-limit, limit);
        m.weights.push_back(std::move(w));
        m.biases.emplace_back(static_cast<std::size_t>(fo), 0.0);
    }
    return m;
}

double mlp_forward(const MlpModel& m, double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("mlp_forward: x must be finite");
    std::vector<double> cur{x}, next;
    for (int k = 0; k <= m.depth; ++k) {
        const int fi = m.fan_in(k), fo = m.fan_out(k);
        const auto& w = m.weights[static_cast<std::size_t>(k)];
        const auto& b = m.biases[static_cast<std::size_t>(k)];
        next.assign(static_cast<std::size_t>(fo), 0.0);
        for (int j = 0; j < fo; ++j) {
            double acc = b[static_cast<std::size_t>(j)];
            for (int i = 0; i < fi; ++i)
                acc += w[static_cast<std::size_t>(j * fi + i)] * cur[static_cast<std::size_t>(i)];
            next[static_cast<std::size_t>(j)] = k == m.depth ? acc : std::max(0.0, acc);
        }
        cur.swap(next);
    }
    return cur[0];
}

void mlp_forward_batch(const MlpModel& m, std::span<const double> xs,
                       std::span<double> out) {
    if (out.size() != xs.size())
        throw std::invalid_argument("mlp_forward_batch: size mismatch");
    Workspace ws;
    ws.resize(m, xs.size());
    forward_batch(m, xs, ws);
    std::copy(ws.out.begin(), ws.out.end(), out.begin());
}

double mlp_loss(const MlpModel& m, std::span<const double> xs,
                std::span<const double> targets) {
    Workspace ws;
    ws.resize(m, xs.size());
    forward_batch(m, xs, ws);
    return loss_from_out(ws, targets);
}

MlpGradients mlp_gradients(const MlpModel& m, std::span<const double> xs,
                           std::span<const double> targets) {
    Workspace ws;
    ws.resize(m, xs.size());
    forward_batch(m, xs, ws);
    MlpGradients g = make_gradients_like(m);
    backward_batch(m, xs, targets, ws, g);
    return g;
}

namespace {

/// L1 by trapezoid quadrature of |target - model| on a uniform grid.
double quadrature_l1(const MlpModel& m, const RegressionTarget& target,
                     int points) {
    const double lo = -1.0, hi = 1.0;
    const double h = (hi - lo) / static_cast<double>(points - 1);
    constexpr int kChunk = 8192;
    std::vector<double> xs, out;
    double acc = 0.0;
    int done = 0;
    while (done < points) {
        const int n = std::min(kChunk, points - done);
        xs.resize(static_cast<std::size_t>(n));
        out.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            xs[static_cast<std::size_t>(i)] = lo + h * static_cast<double>(done + i);
        mlp_forward_batch(m, xs, out);
        for (int i = 0; i < n; ++i) {
            const int idx = done + i;
            const double diff =
                std::abs(target.eval(xs[static_cast<std::size_t>(i)]) -
                         out[static_cast<std::size_t>(i)]);
            const double wgt = (idx == 0 || idx == points - 1) ? 0.5 : 1.0;
            acc += wgt * diff;
        }
        done += n;
    }
    return acc * h;
}

}  // namespace

TrainResult train(MlpModel& m, const RegressionTarget& target, const TrainConfig& cfg) {
    if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (!(cfg.learning_rate > 0.0))
        throw std::invalid_argument("train: learning rate must be positive");
    if (cfg.sample_count < 2)
        throw std::invalid_argument("train: need at least 2 samples");

    const auto t0 = std::chrono::steady_clock::now();

    const std::vector<double> xs = uniform_grid(-1.0, 1.0, cfg.sample_count);
    std::vector<double> targets(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) targets[i] = target.eval(xs[i]);

    Workspace ws;
    ws.resize(m, xs.size());
    MlpGradients g = make_gradients_like(m);
    MlpGradients adam_m = make_gradients_like(m);
    MlpGradients adam_v = make_gradients_like(m);

    TrainResult result;
    result.loss_curve.reserve(static_cast<std::size_t>(cfg.epochs));

    double beta1_pow = 1.0, beta2_pow = 1.0;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        forward_batch(m, xs, ws);
        const double loss = loss_from_out(ws, targets);
        if (!std::isfinite(loss))
            throw std::runtime_error("train: loss diverged at epoch " +
                                     std::to_string(epoch));
        result.loss_curve.push_back(loss);
        backward_batch(m, xs, targets, ws, g);

        beta1_pow *= cfg.beta1;
        beta2_pow *= cfg.beta2;
        const double corr1 = 1.0 - beta1_pow;
        const double corr2 = 1.0 - beta2_pow;
        auto adam_update = [&](std::vector<double>& param, std::vector<double>& grad,
                               std::vector<double>& mom, std::vector<double>& vel) {
            for (std::size_t i = 0; i < param.size(); ++i) {
                mom[i] = cfg.beta1 * mom[i] + (1.0 - cfg.beta1) * grad[i];
                vel[i] = cfg.beta2 * vel[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
                const double mhat = mom[i] / corr1;
                const double vhat = vel[i] / corr2;
                param[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_epsilon);
            }
        };
        for (std::size_t k = 0; k < m.weights.size(); ++k) {
            adam_update(m.weights[k], g.weights[k], adam_m.weights[k], adam_v.weights[k]);
            adam_update(m.biases[k], g.biases[k], adam_m.biases[k], adam_v.biases[k]);
        }
    }

    forward_batch(m, xs, ws);
    result.final_mse = loss_from_out(ws, targets);
    if (!std::isfinite(result.final_mse))
        throw std::runtime_error("train: loss diverged at final evaluation");

    const std::size_t ne = result.loss_curve.size();
    if (ne > 100) {
        const double before = result.loss_curve[ne - 101];
        const double after = result.loss_curve[ne - 1];
        result.saturated =
            std::abs(after - before) < 1e-5 * std::max(std::abs(before), 1e-12);
    }

    // Exact L1 when both the target and the extracted network fit the budget;
    // otherwise two-resolution grid quadrature.
    bool exact_done = false;
    if (target.exact) {
        try {
            const PLFunction model_pl = model_to_pl(m, piece_budget_from_env());
            result.l1 = l1_distance(*target.exact, model_pl);
            result.l1_error_estimate = 0.0;
            result.l1_exact = true;
            exact_done = true;
        } catch (const BudgetError&) {
        }
    }
    if (!exact_done) {
        const int fine = (1 << 20) + 1;
        const int coarse = (1 << 19) + 1;
        result.l1 = quadrature_l1(m, target, fine);
        result.l1_error_estimate = std::abs(result.l1 - quadrature_l1(m, target, coarse));
        result.l1_exact = false;
    }

    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

PLFunction model_to_pl(const MlpModel& m, std::size_t piece_budget) {
    if (!m.finite()) throw std::invalid_argument("model_to_pl: model has non-finite parameters");

    // Shared partition of [-1, 1]; vals[j] holds unit j's PL values on it.
    std::vector<double> xs{-1.0, 1.0};
    std::vector<std::vector<double>> vals{{-1.0, 1.0}};  // the input itself

    for (int k = 0; k <= m.depth; ++k) {
        const int fi = m.fan_in(k), fo = m.fan_out(k);
        const auto& w = m.weights[static_cast<std::size_t>(k)];
        const auto& b = m.biases[static_cast<std::size_t>(k)];

        // Pre-activations are PL on the current partition.
        std::vector<std::vector<double>> pre(static_cast<std::size_t>(fo));
        for (int j = 0; j < fo; ++j) {
            auto& row = pre[static_cast<std::size_t>(j)];
            row.assign(xs.size(), b[static_cast<std::size_t>(j)]);
            for (int i = 0; i < fi; ++i) {
                const double wji = w[static_cast<std::size_t>(j * fi + i)];
                const auto& vrow = vals[static_cast<std::size_t>(i)];
                for (std::size_t s = 0; s < xs.size(); ++s) row[s] += wji * vrow[s];
            }
        }

        if (k == m.depth) {
            std::vector<Knot> knots(xs.size());
            for (std::size_t s = 0; s < xs.size(); ++s) knots[s] = {xs[s], pre[0][s]};
            return PLFunction(std::move(knots));
        }

        // ReLU kinks: zeros of each pre-activation strictly inside a segment.
        std::vector<double> new_knots;
        for (int j = 0; j < fo; ++j) {
            const auto& row = pre[static_cast<std::size_t>(j)];
            for (std::size_t s = 0; s + 1 < xs.size(); ++s) {
                const double a = row[s], c = row[s + 1];
                if ((a > 0.0 && c < 0.0) || (a < 0.0 && c > 0.0))
                    new_knots.push_back(xs[s] + (xs[s + 1] - xs[s]) * a / (a - c));
            }
        }

        if (!new_knots.empty()) {
            std::vector<double> merged = xs;
            merged.insert(merged.end(), new_knots.begin(), new_knots.end());
            std::sort(merged.begin(), merged.end());
            merged.erase(std::unique(merged.begin(), merged.end(),
                                     [](double a, double b) { return b - a <= 1e-13; }),
                         merged.end());
            if (merged.size() > piece_budget)
                throw BudgetError("model_to_pl: piece budget exceeded", k + 1);

            // Re-sample every pre-activation onto the refined partition
            // (linear interpolation within the original segments is exact).
            std::vector<std::vector<double>> refined(static_cast<std::size_t>(fo));
            for (int j = 0; j < fo; ++j) {
                const auto& row = pre[static_cast<std::size_t>(j)];
                auto& rrow = refined[static_cast<std::size_t>(j)];
                rrow.resize(merged.size());
                std::size_t seg = 0;
                for (std::size_t s = 0; s < merged.size(); ++s) {
                    const double x = merged[s];
                    while (seg + 2 < xs.size() && xs[seg + 1] < x) ++seg;
                    if (x == xs[seg]) {
                        rrow[s] = row[seg];
                    } else if (x == xs[seg + 1]) {
                        rrow[s] = row[seg + 1];
                    } else {
                        const double t = (x - xs[seg]) / (xs[seg + 1] - xs[seg]);
                        rrow[s] = row[seg] + t * (row[seg + 1] - row[seg]);
                    }
                }
            }
            xs = std::move(merged);
            pre = std::move(refined);
        }

        vals.assign(static_cast<std::size_t>(fo), {});
        for (int j = 0; j < fo; ++j) {
            auto& vrow = vals[static_cast<std::size_t>(j)];
            vrow.resize(xs.size());
            const auto& row = pre[static_cast<std::size_t>(j)];
            for (std::size_t s = 0; s < xs.size(); ++s) vrow[s] = std::max(0.0, row[s]);
        }
    }
    throw std::logic_error("model_to_pl: unreachable");
}

int task_compositions(TaskKind task) { return task == TaskKind::Hard ? 40 : 8; }

RegressionTarget make_task_target(TaskKind task) {
    const int t = task_compositions(task);
    auto f = std::make_shared<PLFunction>(hard_family(3));
    RegressionTarget target;
    target.name = task == TaskKind::Hard ? "hard" : "easy";
    target.eval = [f, t](double x) { return iterate_eval(*f, t, x); };
    const std::size_t budget = piece_budget_from_env();
    // 2^t knots worst case; only materialize the exact form when affordable.
    if (t <= 20) {
        try {
            target.exact = self_compose(*f, t, budget);
        } catch (const BudgetError&) {
        }
    }
    return target;
}

std::vector<ExperimentRun> run_experiment(TaskKind task,
                                          const std::vector<int>& depths,
                                          int width, const TrainConfig& cfg,
                                          const std::vector<std::uint64_t>& seeds,
                                          int parallelism) {
    std::vector<ExperimentRun> runs;
    if (depths.empty() || seeds.empty()) return runs;

    const RegressionTarget target = make_task_target(task);
    const int t = task_compositions(task);
    const double phi = rho(3).rho;

    struct Job {
        int depth;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (int depth : depths)
        for (std::uint64_t seed : seeds) jobs.push_back({depth, seed});

    auto execute = [&](const Job& job) {
        ExperimentRun run;
        run.task = target.name;
        run.depth = job.depth;
        run.width = width;
        run.seed = job.seed;
        run.epochs = cfg.epochs;

        SeparationConfig scfg;
        scfg.rho = phi;
        scfg.L = phi;
        scfg.t = t;
        scfg.u = width;
        scfg.l = job.depth;
        scfg.x = 0.0;
        scfg.y = phi - 1.0;
        run.floor_headline = theory_bound(scfg).floor_headline;

        TrainConfig run_cfg = cfg;
        run_cfg.seed = job.seed;
        run.model = mlp_init(job.depth, width, job.seed);
        run.result = train(run.model, target, run_cfg);
        return run;
    };

    if (parallelism <= 0)
        parallelism = static_cast<int>(std::thread::hardware_concurrency());
    if (parallelism < 1) parallelism = 1;

    runs.resize(jobs.size());
    std::size_t next = 0;
    while (next < jobs.size()) {
        const std::size_t batch =
            std::min(static_cast<std::size_t>(parallelism), jobs.size() - next);
        std::vector<std::future<ExperimentRun>> futures;
        futures.reserve(batch);
        for (std::size_t i = 0; i < batch; ++i)
            futures.push_back(std::async(std::launch::async, execute, jobs[next + i]));
        for (std::size_t i = 0; i < batch; ++i) runs[next + i] = futures[i].get();
        next += batch;
    }
    return runs;
}

}  // namespace chaossep
