#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace radiomap {

/// Undirected sensor communication graph. The Laplacian is
/// diag(A 1) - A.
struct SensorGraph {
  Eigen::MatrixXd adjacency;
  Eigen::MatrixXd laplacian;

  static SensorGraph from_adjacency(Eigen::MatrixXd a);
  static SensorGraph from_edges(int num_sensors, const std::vector<std::pair<int, int>>& edges);
  int size() const { return static_cast<int>(adjacency.rows()); }
};

/// Edge-list CSV `a,b` (one edge per line, header optional).
SensorGraph load_sensor_graph(const std::string& path, int num_sensors);

/// Observations of a subset of sensors at one time index.
struct Snapshot {
  int time = 0;
  std::vector<int> observed_indices;
  Eigen::VectorXd observed_values;
};

/// Snapshot CSV `time,sensor_index,value`, grouped by time in file order.
std::vector<Snapshot> load_snapshots(const std::string& path);
void save_snapshots(const std::vector<Snapshot>& snapshots, const std::string& path);

struct Dictionary {
  Eigen::MatrixXd atoms;  // sensors x atoms, columns inside the unit ball
  Eigen::Index num_atoms() const { return atoms.cols(); }
};

struct SparseCodeResult {
  Eigen::VectorXd code;
  bool converged = false;
  int iterations = 0;
};

/// Minimizes 1/2 ||m_obs - O D s||^2 + lambda_s ||s||_1
///            + lambda_L/2 s^T D^T L D s  over s (proximal gradient).
SparseCodeResult sparse_code(const Dictionary& dict, const Snapshot& snapshot, double lambda_s,
                             double lambda_l, const Eigen::MatrixXd& laplacian,
                             const Eigen::VectorXd* warm_start = nullptr,
                             double tolerance = 1e-8, int max_iterations = 50000);

double snapshot_objective(const Dictionary& dict, const Snapshot& snapshot,
                          const Eigen::VectorXd& code, double lambda_s, double lambda_l,
                          const Eigen::MatrixXd& laplacian);

struct LearnResult {
  Dictionary dictionary;
  std::vector<Eigen::VectorXd> codes;
  std::vector<double> objective_history;  // one entry per sweep
  bool converged = false;
  int sweeps = 0;
};

/// Block coordinate descent over sparse codes and dictionary columns.
/// Each column update solves its ball-constrained quadratic exactly, so
/// the total objective never increases between sweeps.
LearnResult learn_dictionary(const std::vector<Snapshot>& snapshots, int num_atoms, double lambda_s,
                             double lambda_l, const Eigen::MatrixXd& laplacian, std::uint64_t seed,
                             int max_sweeps = 200, double tolerance = 1e-6);

/// Operational phase: sparse-code the snapshot, then reconstruct all
/// sensor values as D s.
Eigen::VectorXd reconstruct(const Dictionary& dict, const Snapshot& snapshot, double lambda_s,
                            double lambda_l, const Eigen::MatrixXd& laplacian);

}  // namespace radiomap
