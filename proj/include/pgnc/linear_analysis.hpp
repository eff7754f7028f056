#pragma once

#include <bitset>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pgnc/vehicle_model.hpp"

namespace pgnc {

/// Subset of {T1..T4}; bit i set means thruster T(i+1) is out.
class ThrusterSet {
 public:
  ThrusterSet() = default;
  ThrusterSet(std::initializer_list<int> thruster_numbers);

  /// Parses "T1".."T4" (or "1".."4"). Throws std::invalid_argument.
  static ThrusterSet FromNames(const std::vector<std::string>& names);

  bool contains(int index) const { return bits_.test(index); }
  void insert(int index) { bits_.set(index); }
  bool empty() const { return bits_.none(); }
  std::size_t size() const { return bits_.count(); }
  bool is_subset_of(const ThrusterSet& other) const {
    return (bits_ & ~other.bits_).none();
  }
  std::vector<std::string> names() const;
  /// "{}" or "{T1,T2}".
  std::string ToString() const;

 private:
  std::bitset<4> bits_;
};

struct FailureReport {
  ThrusterSet failed_set;
  int controllability_rank = 0;
  /// controllability_rank == state dimension.
  bool reachable = false;
};

Eigen::VectorXcd eigenvalues(const Eigen::MatrixXd& A);

/// [B, AB, ..., A^(n-1) B].
Eigen::MatrixXd controllability_matrix(const Eigen::MatrixXd& A,
                                       const Eigen::MatrixXd& B);

/// Number of singular values above tolerance * sigma_max.
int numerical_rank(const Eigen::MatrixXd& M, double tolerance = 1e-10);

/// Drops the failed thrusters' columns of B and checks reachability.
FailureReport failure_analysis(const LinearModel& model,
                               const ThrusterSet& failed_set);

/// Same analysis on an arbitrary (A, B) with four input columns.
FailureReport failure_analysis(const Eigen::MatrixXd& A,
                               const Eigen::MatrixXd& B,
                               const ThrusterSet& failed_set);

/// Removes (not zeroes) the columns of failed thrusters.
Eigen::MatrixXd remove_failed_columns(const Eigen::MatrixXd& B,
                                      const ThrusterSet& failed_set);

}  // namespace pgnc
