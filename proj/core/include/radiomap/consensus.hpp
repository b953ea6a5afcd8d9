#pragma once

#include <Eigen/Core>
#include <vector>

namespace radiomap {

struct ConsensusRegularizer {
  enum class Kind { kNone, kSquaredNorm, kL1 };
  Kind kind = Kind::kNone;
  double weight = 0.0;  // lambda_r
};

/// Per-agent regression data block.
struct AgentData {
  Eigen::MatrixXd x;  // M_n x Theta
  Eigen::VectorXd y;  // M_n
};

struct AgentState {
  Eigen::VectorXd theta;
  Eigen::VectorXd gamma;
  Eigen::VectorXd u;
  Eigen::VectorXd lambda;
};

/// Record of one cross-agent read; diagnostics assert locality.
struct MessageLogEntry {
  int round = 0;
  int agent = 0;
  int neighbor = 0;
};

/// Decentralized regression problem over a connected undirected graph.
class ConsensusProblem {
 public:
  ConsensusProblem(int num_agents, const std::vector<std::pair<int, int>>& edges,
                   ConsensusRegularizer regularizer, double rho);

  int num_agents() const { return static_cast<int>(neighbors_.size()); }
  const std::vector<int>& neighbors(int agent) const { return neighbors_[static_cast<std::size_t>(agent)]; }
  const ConsensusRegularizer& regularizer() const { return regularizer_; }
  double rho() const { return rho_; }
  bool has_edge(int a, int b) const;

 private:
  std::vector<std::vector<int>> neighbors_;
  ConsensusRegularizer regularizer_;
  double rho_;
};

/// Proximal step argmin_theta weight * psi(theta) + 1/2 ||theta - a||^2.
Eigen::VectorXd prox_psi(const ConsensusRegularizer& reg, const Eigen::VectorXd& a, double weight);

/// One synchronous round: every agent reads only its own state and its
/// neighbors' previous-round theta, then updates u, lambda, theta,
/// gamma in order.
void admm_round(const ConsensusProblem& problem, const std::vector<AgentData>& data,
                std::vector<AgentState>& states, int round,
                std::vector<MessageLogEntry>* message_log = nullptr);

struct ConsensusResult {
  std::vector<Eigen::VectorXd> thetas;
  int rounds = 0;
  bool converged = false;
  std::vector<double> disagreement_history;
  std::vector<double> change_history;
  std::vector<MessageLogEntry> message_log;
};

/// Runs rounds until neighbors agree within tol and the per-round theta
/// change falls below tol, or max_rounds is hit.
ConsensusResult run_to_consensus(const ConsensusProblem& problem, const std::vector<AgentData>& data,
                                 double tol, int max_rounds);

/// Centralized solution of 1/2 ||y - X theta||^2 + psi(theta) for the
/// closed-form regularizers (none / squared norm).
Eigen::VectorXd centralized_solution(const std::vector<AgentData>& data,
                                     const ConsensusRegularizer& reg);

}  // namespace radiomap
