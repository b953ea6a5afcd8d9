#include "radiomap/consensus.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "radiomap/linalg.hpp"

namespace radiomap {

ConsensusProblem::ConsensusProblem(int num_agents, const std::vector<std::pair<int, int>>& edges,
                                   ConsensusRegularizer regularizer, double rho)
    : regularizer_(regularizer), rho_(rho) {
  if (num_agents < 1) throw std::invalid_argument("ConsensusProblem: need at least one agent");
  if (!(rho > 0.0)) throw std::invalid_argument("ConsensusProblem: rho must be positive");
  neighbors_.resize(static_cast<std::size_t>(num_agents));
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= num_agents || b >= num_agents || a == b) {
      throw std::invalid_argument("ConsensusProblem: invalid edge");
    }
    neighbors_[static_cast<std::size_t>(a)].push_back(b);
    neighbors_[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& nb : neighbors_) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }

  // The distributed iterates only match the centralized solution on a
  // connected graph.
  std::vector<bool> seen(static_cast<std::size_t>(num_agents), false);
  std::vector<int> stack{0};
  seen[0] = true;
  int count = 0;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    ++count;
    for (int w : neighbors_[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        stack.push_back(w);
      }
    }
  }
  if (count != num_agents) throw std::invalid_argument("ConsensusProblem: graph must be connected");
}

bool ConsensusProblem::has_edge(int a, int b) const {
  const auto& nb = neighbors_[static_cast<std::size_t>(a)];
  return std::find(nb.begin(), nb.end(), b) != nb.end();
}

Eigen::VectorXd prox_psi(const ConsensusRegularizer& reg, const Eigen::VectorXd& a, double weight) {
  if (!(weight > 0.0)) throw std::invalid_argument("prox_psi: weight must be positive");
  switch (reg.kind) {
    case ConsensusRegularizer::Kind::kNone:
      return a;
    case ConsensusRegularizer::Kind::kSquaredNorm:
      return a / (1.0 + 2.0 * reg.weight * weight);
    case ConsensusRegularizer::Kind::kL1:
      return soft_threshold(a, reg.weight * weight);
  }
  throw std::logic_error("prox_psi: unknown regularizer");
}

void admm_round(const ConsensusProblem& problem, const std::vector<AgentData>& data,
                std::vector<AgentState>& states, int round,
                std::vector<MessageLogEntry>* message_log) {
  const int n_agents = problem.num_agents();
  if (static_cast<int>(data.size()) != n_agents || static_cast<int>(states.size()) != n_agents) {
    throw std::invalid_argument("admm_round: data/state size mismatch");
  }
  const double rho = problem.rho();

  // Previous-round theta snapshots: every neighbor read goes through
  // here and is logged, which keeps the locality audit honest.
  std::vector<Eigen::VectorXd> theta_snapshot;
  theta_snapshot.reserve(states.size());
  for (const AgentState& s : states) theta_snapshot.push_back(s.theta);
  auto read_neighbor_theta = [&](int agent, int neighbor) -> const Eigen::VectorXd& {
    if (message_log != nullptr) message_log->push_back({round, agent, neighbor});
    return theta_snapshot[static_cast<std::size_t>(neighbor)];
  };

  for (int n = 0; n < n_agents; ++n) {
    AgentState& s = states[static_cast<std::size_t>(n)];
    const auto& neighbors = problem.neighbors(n);
    const double c_n = rho * (1.0 + 2.0 * static_cast<double>(neighbors.size()));

    Eigen::VectorXd neighbor_diff = Eigen::VectorXd::Zero(s.theta.size());
    Eigen::VectorXd neighbor_sum = Eigen::VectorXd::Zero(s.theta.size());
    for (int nb : neighbors) {
      const Eigen::VectorXd& theta_nb = read_neighbor_theta(n, nb);
      neighbor_diff += theta_snapshot[static_cast<std::size_t>(n)] - theta_nb;
      neighbor_sum += theta_snapshot[static_cast<std::size_t>(n)] + theta_nb;
    }

    s.u += rho * neighbor_diff;
    s.lambda += rho * (theta_snapshot[static_cast<std::size_t>(n)] - s.gamma);
    const Eigen::VectorXd a = (rho * neighbor_sum + rho * s.gamma - s.u - s.lambda) / c_n;
    s.theta = prox_psi(problem.regularizer(), a, 1.0 / (static_cast<double>(n_agents) * c_n));

    const AgentData& d = data[static_cast<std::size_t>(n)];
    Eigen::MatrixXd lhs = d.x.transpose() * d.x;
    lhs.diagonal().array() += rho;
    s.gamma = solve_spd(lhs, (d.x.transpose() * d.y + rho * s.theta + s.lambda).eval());
  }
}

ConsensusResult run_to_consensus(const ConsensusProblem& problem, const std::vector<AgentData>& data,
                                 double tol, int max_rounds) {
  const int n_agents = problem.num_agents();
  if (static_cast<int>(data.size()) != n_agents) {
    throw std::invalid_argument("run_to_consensus: one data block per agent");
  }
  const Eigen::Index dim = data.front().x.cols();
  for (const AgentData& d : data) {
    if (d.x.cols() != dim || d.x.rows() != d.y.size()) {
      throw std::invalid_argument("run_to_consensus: inconsistent data shapes");
    }
  }

  ConsensusResult result;
  std::vector<AgentState> states(static_cast<std::size_t>(n_agents));
  for (AgentState& s : states) {
    s.theta = Eigen::VectorXd::Zero(dim);
    s.gamma = Eigen::VectorXd::Zero(dim);
    s.u = Eigen::VectorXd::Zero(dim);
    s.lambda = Eigen::VectorXd::Zero(dim);
  }

  for (int round = 1; round <= max_rounds; ++round) {
    std::vector<Eigen::VectorXd> prev;
    prev.reserve(states.size());
    for (const AgentState& s : states) prev.push_back(s.theta);

    admm_round(problem, data, states, round, &result.message_log);
    result.rounds = round;

    double disagreement = 0.0;
    for (int n = 0; n < n_agents; ++n) {
      for (int nb : problem.neighbors(n)) {
        disagreement = std::max(disagreement,
                                (states[static_cast<std::size_t>(n)].theta -
                                 states[static_cast<std::size_t>(nb)].theta)
                                    .norm());
      }
    }
    double change = 0.0;
    for (int n = 0; n < n_agents; ++n) {
      const AgentState& s = states[static_cast<std::size_t>(n)];
      change = std::max(change, (s.theta - prev[static_cast<std::size_t>(n)]).norm());
      // Primal residual: theta lags gamma by one round, so theta alone
      // can sit still while the iteration is far from its fixed point.
      change = std::max(change, (s.theta - s.gamma).norm());
    }
    result.disagreement_history.push_back(disagreement);
    result.change_history.push_back(change);
    if (disagreement <= tol && change <= tol) {
      result.converged = true;
      break;
    }
  }
  for (const AgentState& s : states) result.thetas.push_back(s.theta);
  return result;
}

Eigen::VectorXd centralized_solution(const std::vector<AgentData>& data,
                                     const ConsensusRegularizer& reg) {
  if (data.empty()) throw std::invalid_argument("centralized_solution: empty data");
  if (reg.kind == ConsensusRegularizer::Kind::kL1) {
    throw std::invalid_argument("centralized_solution: closed form exists only for none/squared");
  }
  const Eigen::Index dim = data.front().x.cols();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  for (const AgentData& d : data) {
    gram += d.x.transpose() * d.x;
    rhs += d.x.transpose() * d.y;
  }
  if (reg.kind == ConsensusRegularizer::Kind::kSquaredNorm) {
    gram.diagonal().array() += 2.0 * reg.weight;
  }
  return solve_spd(gram, rhs);
}

}  // namespace radiomap
