#pragma once

// Small dense networks for the actor and the critic, with explicit forward
// passes and hand-derived gradients. Parameters of a network live in one flat
// vector so soft updates, optimizers and finite-difference checks can treat
// them uniformly.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "affnego/random.hpp"

namespace affnego {

inline constexpr std::size_t kStateDim = 4;
using StateVec = std::array<double, kStateDim>;

/// Row-major weight block followed by its bias, located inside a flat vector.
struct DenseView {
  std::size_t offset = 0;
  std::size_t rows = 0;  // outputs
  std::size_t cols = 0;  // inputs

  std::size_t weight_count() const { return rows * cols; }
  std::size_t size() const { return rows * cols + rows; }
  std::size_t bias_offset() const { return offset + rows * cols; }

  // out = W x + b
  void forward(std::span<const double> params, const double* x, double* out) const;
  // grad_W += g x^T, grad_b += g; grad_x (if non-null) += W^T g
  void backward(std::span<const double> params, const double* x, const double* g, std::span<double> grad,
                double* grad_x) const;
  // W ~ U(-bound, bound), b ~ U(-bound, bound)
  void init_uniform(std::span<double> params, double bound, Rng& rng) const;
};

class Actor {
 public:
  struct Cache {
    std::vector<double> hidden;  // post-ReLU
    double out_pre = 0.0;
    double out = 0.0;
  };

  explicit Actor(std::size_t hidden = 50);

  // Hidden layer U(+-1/sqrt(fan_in)), output layer U(+-final_bound).
  void init(Rng& rng, double final_bound = 3e-3);

  double forward(const StateVec& s) const;
  double forward(const StateVec& s, Cache& cache) const;
  // grad += dout * d(out)/d(theta)
  void backward(const StateVec& s, const Cache& cache, double dout, std::span<double> grad) const;

  std::size_t hidden() const { return hidden_; }
  std::size_t param_count() const { return params_.size(); }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  const DenseView& layer(std::size_t i) const { return i == 0 ? l1_ : l2_; }

 private:
  std::size_t hidden_;
  DenseView l1_, l2_;
  std::vector<double> params_;
};

class Critic {
 public:
  struct Cache {
    std::vector<double> state_hidden;   // post-ReLU, size hidden
    std::vector<double> action_hidden;  // post-ReLU, size hidden
    std::vector<double> joint;          // post-ReLU, size joint
    double q = 0.0;
  };

  explicit Critic(std::size_t hidden = 50, std::size_t joint = 10);

  void init(Rng& rng, double final_bound = 3e-3);

  double forward(const StateVec& s, double a) const;
  double forward(const StateVec& s, double a, Cache& cache) const;
  // grad += dq * dQ/dtheta
  void backward(const StateVec& s, double a, const Cache& cache, double dq, std::span<double> grad) const;
  // dQ/da at the cached point.
  double action_gradient(const Cache& cache) const;

  std::size_t hidden() const { return hidden_; }
  std::size_t joint() const { return joint_; }
  std::size_t param_count() const { return params_.size(); }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  // Layers in storage order: state branch, action branch, joint, output.
  const DenseView& layer(std::size_t i) const;

 private:
  std::size_t hidden_, joint_;
  DenseView ls_, la_, lj_, lo_;
  std::vector<double> params_;
};

/// theta' <- rho theta + (1 - rho) theta'
void soft_update(std::span<double> target, std::span<const double> source, double rho);

enum class OptimizerKind { Sgd, Momentum, Adam };

/// Gradient ascent/descent on a flat parameter vector.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double rate, std::size_t n, double beta1 = 0.9, double beta2 = 0.999,
            double eps = 1e-8);
  // params -= rate * step(grad)
  void descend(std::span<double> params, std::span<const double> grad);

  OptimizerKind kind() const { return kind_; }

 private:
  OptimizerKind kind_;
  double rate_, beta1_, beta2_, eps_;
  std::vector<double> m_, v_;
  std::size_t t_ = 0;
};

}  // namespace affnego
