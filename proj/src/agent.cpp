#include "edgeq/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edgeq {

namespace {

void check_hyperparams(const AgentHyperparams& hp) {
  if (!(hp.learning_rate > 0.0) || !std::isfinite(hp.learning_rate)) {
    throw std::invalid_argument("agent: learning_rate must be finite and > 0");
  }
  if (!(hp.discount >= 0.0) || !(hp.discount < 1.0)) {
    throw std::invalid_argument("agent: discount must be in [0,1)");
  }
  if (!(hp.epsilon_start >= 0.0) || !(hp.epsilon_start <= 1.0) ||
      !(hp.epsilon_min >= 0.0) || !(hp.epsilon_min <= 1.0) ||
      hp.epsilon_min > hp.epsilon_start) {
    throw std::invalid_argument("agent: need 0 <= epsilon_min <= epsilon_start <= 1");
  }
  if (!(hp.epsilon_decay > 0.0) || !(hp.epsilon_decay <= 1.0)) {
    throw std::invalid_argument("agent: epsilon_decay must be in (0,1]");
  }
  if (hp.batch_size == 0 || hp.target_sync_interval == 0 || hp.replay_capacity == 0) {
    throw std::invalid_argument("agent: counts must be >= 1");
  }
  if (hp.replay_capacity < hp.batch_size) {
    throw std::invalid_argument("agent: replay_capacity must be >= batch_size");
  }
  for (const std::size_t h : hp.hidden_layers) {
    if (h == 0) throw std::invalid_argument("agent: hidden layer sizes must be >= 1");
  }
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s;
}

}  // namespace

Action argmax_action(std::span<const double> q_values) {
  if (q_values.size() != static_cast<std::size_t>(kNumActions)) {
    throw std::invalid_argument("argmax_action: expected one value per action");
  }
  int best = 0;
  for (int i = 1; i < kNumActions; ++i) {
    if (q_values[i] > q_values[best]) best = i;  // ties keep the lowest index
  }
  return action_from_index(best);
}

Action select_action(std::span<const double> q_values, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0) || !(epsilon <= 1.0)) {
    throw std::invalid_argument("select_action: epsilon must be in [0,1]");
  }
  // At epsilon 0 no randomness is consumed, keeping greedy runs stream-stable.
  if (epsilon > 0.0 && rng.uniform01() < epsilon) {
    return action_from_index(static_cast<int>(rng.uniform_int(0, kNumActions - 1)));
  }
  return argmax_action(q_values);
}

double bellman_target(double reward, double discount,
                      std::span<const double> next_q_values, bool terminal) {
  if (!std::isfinite(reward)) throw std::invalid_argument("bellman_target: non-finite reward");
  if (terminal) return reward;
  if (next_q_values.empty()) {
    throw std::invalid_argument("bellman_target: empty next-state values");
  }
  double best = next_q_values[0];
  for (const double q : next_q_values) {
    if (!std::isfinite(q)) throw std::invalid_argument("bellman_target: non-finite value");
    best = std::max(best, q);
  }
  return reward + discount * best;
}

LossGrad td_loss_and_gradient(const QNetwork& net, const QNetwork& target,
                              std::span<const Transition* const> batch, double discount) {
  if (batch.empty()) throw std::invalid_argument("td_loss: empty batch");
  if (!net.same_shape(target)) throw std::invalid_argument("td_loss: network shapes differ");
  if (net.out_dim() != static_cast<std::size_t>(kNumActions)) {
    throw std::invalid_argument("td_loss: network must emit one value per action");
  }

  LossGrad result;
  result.grad = Gradient::zeros_like(net);
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  const auto& layers = net.layers();

  std::vector<std::vector<double>> acts;
  std::vector<double> delta, delta_prev;
  for (const Transition* tr : batch) {
    if (tr == nullptr) throw std::invalid_argument("td_loss: null transition");
    // The target is a constant: it never contributes gradient terms.
    double y;
    if (tr->terminal) {
      y = tr->reward;
    } else {
      const std::vector<double> next_q = target.forward(tr->next_state);
      y = bellman_target(tr->reward, discount, next_q, false);
    }

    net.forward_trace(tr->state, acts);
    const std::vector<double>& q = acts.back();
    const int a = static_cast<int>(tr->action);
    const double diff = q[static_cast<std::size_t>(a)] - y;
    result.loss += diff * diff;

    delta.assign(net.out_dim(), 0.0);
    delta[static_cast<std::size_t>(a)] = 2.0 * inv_batch * diff;

    for (std::size_t li = layers.size(); li-- > 0;) {
      const QNetwork::Layer& layer = layers[li];
      const std::vector<double>& x = acts[li];
      auto& gl = result.grad.layers[li];
      for (std::size_t o = 0; o < layer.out; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        gl.b[o] += d;
        double* gw = &gl.w[o * layer.in];
        for (std::size_t k = 0; k < layer.in; ++k) gw[k] += d * x[k];
      }
      if (li == 0) break;
      delta_prev.assign(layer.in, 0.0);
      for (std::size_t o = 0; o < layer.out; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        const double* row = &layer.w[o * layer.in];
        for (std::size_t k = 0; k < layer.in; ++k) delta_prev[k] += d * row[k];
      }
      // x is the previous layer's rectified output; zero entries are clipped.
      for (std::size_t k = 0; k < layer.in; ++k) {
        if (x[k] <= 0.0) delta_prev[k] = 0.0;
      }
      delta.swap(delta_prev);
    }
  }
  result.loss *= inv_batch;
  return result;
}

void sync_target(const QNetwork& net, QNetwork& target) {
  if (!net.same_shape(target)) throw std::invalid_argument("sync_target: shape mismatch");
  target = net;
}

Action GreedyQPolicy::decide(std::size_t, const JointState& state) {
  return argmax_action(net_->forward(state.combined));
}

JointObserver::JointObserver(const CollabGraph* graph, AggregationKind kind,
                             std::size_t stride)
    : graph_(graph), kind_(kind), stride_(stride == 0 ? 1 : stride) {
  if (graph_ == nullptr) throw std::invalid_argument("joint observer: null graph");
}

std::vector<JointState> JointObserver::observe_all(const Env& env, std::int64_t step_index) {
  const std::size_t n = env.n_devices();
  if (graph_->n_devices != n) {
    throw std::invalid_argument("joint observer: graph and environment device counts differ");
  }
  std::vector<std::vector<double>> locals(n);
  for (std::size_t i = 0; i < n; ++i) locals[i] = env.observe_vector(i);

  const bool refresh =
      cached_agg_.empty() || step_index % static_cast<std::int64_t>(stride_) == 0;
  if (refresh) {
    cached_agg_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      cached_agg_[i] = aggregate_neighbors(*graph_, locals, i, kind_);
    }
  }

  std::vector<JointState> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(joint_state(std::move(locals[i]), cached_agg_[i]));
  }
  return out;
}

TrainResult train(const EnvFactory& make_env, const CollabGraph& graph,
                  const AgentHyperparams& hp, const TrainOptions& opts) {
  check_hyperparams(hp);
  if (opts.episodes == 0) throw std::invalid_argument("train: episodes must be >= 1");
  if (!make_env) throw std::invalid_argument("train: null environment factory");

  // Probe the joint-state arity before building the network.
  const std::size_t state_dim = make_env(derive_seed(opts.seed, 0))->state_dim();
  std::vector<std::size_t> sizes;
  sizes.push_back(2 * state_dim);
  sizes.insert(sizes.end(), hp.hidden_layers.begin(), hp.hidden_layers.end());
  sizes.push_back(static_cast<std::size_t>(kNumActions));

  Rng init_rng(derive_seed(opts.seed, 1));
  QNetwork net = QNetwork::glorot(std::move(sizes), init_rng);
  QNetwork target = net;
  ReplayBuffer replay(hp.replay_capacity);
  Rng agent_rng(derive_seed(opts.seed, 2));

  TrainResult result;
  result.log.reserve(opts.episodes);
  double epsilon = hp.epsilon_start;
  std::size_t global_step = 0;

  std::vector<double> q(kNumActions);
  for (std::size_t ep = 0; ep < opts.episodes; ++ep) {
    auto env = make_env(derive_seed(opts.seed, 100 + ep));
    if (env == nullptr) throw std::invalid_argument("train: factory returned null env");
    const std::size_t n = env->n_devices();
    JointObserver observer(&graph, opts.aggregation, opts.aggregation_stride);

    EpisodeStats stats;
    stats.episode = ep;
    stats.epsilon = epsilon;
    double loss_sum = 0.0;
    double util_sum = 0.0;
    double delay_sum = 0.0;
    std::size_t delay_count = 0;
    std::size_t steps = 0;

    std::int64_t t = 0;
    std::vector<JointState> joints = observer.observe_all(*env, t);
    std::vector<Action> actions(n);
    while (!env->terminal()) {
      for (std::size_t i = 0; i < n; ++i) {
        q = net.forward(joints[i].combined);
        actions[i] = select_action(q, epsilon, agent_rng);
      }
      const StepOutcome outcome = env->step(actions);
      ++t;
      const bool done = env->terminal();
      std::vector<JointState> next_joints = observer.observe_all(*env, t);

      for (std::size_t i = 0; i < n; ++i) {
        replay.push(Transition{joints[i].combined, actions[i], outcome.reward[i],
                               next_joints[i].combined, done});
      }

      stats.total_reward += sum(outcome.reward);
      stats.energy_mwh += sum(outcome.energy_mwh);
      for (const double d : outcome.completed_task_delays_ms) {
        delay_sum += d;
        ++delay_count;
      }
      util_sum += outcome.edge_utilization;
      ++steps;

      if (replay.size() >= hp.batch_size) {
        const auto batch = replay.sample(hp.batch_size, agent_rng);
        LossGrad lg = td_loss_and_gradient(net, target, batch, hp.discount);
        sgd_update(net, lg.grad, hp.learning_rate);
        loss_sum += lg.loss;
        ++stats.updates;
      }

      ++global_step;
      if (global_step % hp.target_sync_interval == 0) sync_target(net, target);
      joints = std::move(next_joints);
    }

    stats.mean_loss = stats.updates > 0 ? loss_sum / static_cast<double>(stats.updates) : 0.0;
    stats.avg_delay_ms = delay_count > 0 ? delay_sum / static_cast<double>(delay_count) : 0.0;
    stats.utilization = steps > 0 ? util_sum / static_cast<double>(steps) : 0.0;
    result.log.push_back(stats);

    epsilon = std::max(hp.epsilon_min, epsilon * hp.epsilon_decay);
  }

  result.net = std::move(net);
  return result;
}

}  // namespace edgeq
