#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace clipadp {

// Upper bound on any state, action or network-input dimension. Bounded
// dynamic storage keeps per-step vectors off the heap.
inline constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim,
                          kMaxDim>;

// Network weights are unbounded in size.
using Weights = Eigen::VectorXd;

using State = Vec;
using Action = Vec;

// Terminal-boundary tangent plane: points r with (r - point) . normal == 0.
struct Plane {
  Vec point;
  Vec normal;
};

// Derivatives use the transposed-Jacobian layout throughout: df_dx(i, j) is
// d f^j / d x^i, df_da(i, j) is d f^j / d a^i.
struct ModelJacobians {
  Mat df_dx;  // n x n
  Mat df_da;  // m x n
  Vec dU_dx;  // n
  Vec dU_da;  // m
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The transition runs (numerically) parallel to the boundary plane.
class DegeneratePlaneError : public Error {
 public:
  using Error::Error;
};

// An unroll hit max_steps without reaching a terminal state.
class TruncationError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Caller broke an operation's precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace clipadp
