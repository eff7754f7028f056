#include "pgnc/linear_analysis.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace pgnc {

ThrusterSet::ThrusterSet(std::initializer_list<int> thruster_numbers) {
  for (int n : thruster_numbers) {
    if (n < 1 || n > 4) {
      throw std::invalid_argument("thruster number must be in 1..4");
    }
    bits_.set(n - 1);
  }
}

ThrusterSet ThrusterSet::FromNames(const std::vector<std::string>& names) {
  ThrusterSet set;
  for (const auto& name : names) {
    std::string digits = name;
    if (!digits.empty() && (digits[0] == 'T' || digits[0] == 't')) {
      digits.erase(0, 1);
    }
    if (digits.size() != 1 || digits[0] < '1' || digits[0] > '4') {
      throw std::invalid_argument("unknown thruster '" + name +
                                  "' (expected T1..T4)");
    }
    set.insert(digits[0] - '1');
  }
  return set;
}

std::vector<std::string> ThrusterSet::names() const {
  std::vector<std::string> out;
  for (int i = 0; i < 4; ++i) {
    if (bits_.test(i)) out.push_back("T" + std::to_string(i + 1));
  }
  return out;
}

std::string ThrusterSet::ToString() const {
  std::string s = "{";
  const auto n = names();
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (i) s += ",";
    s += n[i];
  }
  return s + "}";
}

Eigen::VectorXcd eigenvalues(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) {
    throw std::invalid_argument("eigenvalues: matrix must be square");
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(A, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalues: eigen decomposition failed");
  }
  return solver.eigenvalues();
}

Eigen::MatrixXd controllability_matrix(const Eigen::MatrixXd& A,
                                       const Eigen::MatrixXd& B) {
  if (A.rows() != A.cols() || B.rows() != A.rows()) {
    throw std::invalid_argument("controllability_matrix: dimension mismatch");
  }
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  Eigen::MatrixXd ctrb(n, n * m);
  if (m == 0) return ctrb;
  ctrb.leftCols(m) = B;
  for (Eigen::Index i = 1; i < n; ++i) {
    ctrb.middleCols(m * i, m) = A * ctrb.middleCols(m * (i - 1), m);
  }
  return ctrb;
}

int numerical_rank(const Eigen::MatrixXd& M, double tolerance) {
  if (tolerance < 0.0) {
    throw std::invalid_argument("numerical_rank: tolerance must be >= 0");
  }
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double largest = sv(0);
  if (largest <= 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tolerance * largest) ++rank;
  }
  return rank;
}

Eigen::MatrixXd remove_failed_columns(const Eigen::MatrixXd& B,
                                      const ThrusterSet& failed_set) {
  if (B.cols() != 4) {
    throw std::invalid_argument("remove_failed_columns: B must have 4 columns");
  }
  Eigen::MatrixXd reduced(B.rows(), 4 - static_cast<Eigen::Index>(failed_set.size()));
  Eigen::Index c = 0;
  for (int j = 0; j < 4; ++j) {
    if (!failed_set.contains(j)) reduced.col(c++) = B.col(j);
  }
  return reduced;
}

FailureReport failure_analysis(const Eigen::MatrixXd& A,
                               const Eigen::MatrixXd& B,
                               const ThrusterSet& failed_set) {
  FailureReport report;
  report.failed_set = failed_set;
  const Eigen::MatrixXd reduced = remove_failed_columns(B, failed_set);
  report.controllability_rank =
      reduced.cols() == 0 ? 0
                          : numerical_rank(controllability_matrix(A, reduced));
  report.reachable = report.controllability_rank == A.rows();
  return report;
}

FailureReport failure_analysis(const LinearModel& model,
                               const ThrusterSet& failed_set) {
  return failure_analysis(Eigen::MatrixXd(model.A), Eigen::MatrixXd(model.B),
                          failed_set);
}

}  // namespace pgnc
