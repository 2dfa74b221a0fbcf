#pragma once

#include <Eigen/Dense>

namespace chaoslab {

enum class LinProgStatus { Optimal, Unbounded };

struct LinProgResult {
  LinProgStatus status = LinProgStatus::Optimal;
  double objective = 0.0;
  Eigen::VectorXd x;
};

// Dense primal simplex for: maximize c.x subject to A x <= b with x free and
// b >= 0 componentwise (slack basis is then immediately feasible). Free
// variables are handled by the x = u - v split. Dantzig pricing with a switch
// to Bland's rule after a fixed number of pivots guards against cycling on
// the highly degenerate (many b_i = 0) programs the metric module produces.
LinProgResult maximize_free(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                            const Eigen::VectorXd& b);

// Same program with x >= 0 instead of free. Skipping the u - v split halves
// the structural columns, which matters for the dense tableau: prefer this
// entry point whenever the model can be shifted to nonnegative variables.
LinProgResult maximize_nonneg(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                              const Eigen::VectorXd& b);

}  // namespace chaoslab
