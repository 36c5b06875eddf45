#include "affnego/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "affnego/errors.hpp"
#include "affnego/kernels.hpp"

namespace affnego {
namespace {

void relu(std::vector<double>& v) {
  for (auto& x : v) x = x > 0.0 ? x : 0.0;
}

// Zero the upstream gradient where the ReLU was inactive.
void relu_mask(const std::vector<double>& post, std::vector<double>& g) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(post[i] > 0.0)) g[i] = 0.0;
  }
}

}  // namespace

void DenseView::forward(std::span<const double> params, const double* x, double* out) const {
  simd::active().matvec(params.data() + offset, params.data() + bias_offset(), x, out, rows, cols);
}

void DenseView::backward(std::span<const double> params, const double* x, const double* g, std::span<double> grad,
                         double* grad_x) const {
  const auto& k = simd::active();
  double* gw = grad.data() + offset;
  double* gb = grad.data() + bias_offset();
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] == 0.0) continue;
    k.axpy(gw + r * cols, x, g[r], cols);
    gb[r] += g[r];
  }
  if (grad_x) k.matvec_transposed_acc(params.data() + offset, g, grad_x, rows, cols);
}

void DenseView::init_uniform(std::span<double> params, double bound, Rng& rng) const {
  std::uniform_real_distribution<double> u(-bound, bound);
  for (std::size_t i = 0; i < size(); ++i) params[offset + i] = u(rng);
}

// ---- actor

Actor::Actor(std::size_t hidden) : hidden_(hidden) {
  if (hidden_ == 0) throw DomainError("actor: hidden width must be positive");
  l1_ = {0, hidden_, kStateDim};
  l2_ = {l1_.size(), 1, hidden_};
  params_.assign(l1_.size() + l2_.size(), 0.0);
}

void Actor::init(Rng& rng, double final_bound) {
  l1_.init_uniform(params_, 1.0 / std::sqrt(static_cast<double>(kStateDim)), rng);
  l2_.init_uniform(params_, final_bound, rng);
}

double Actor::forward(const StateVec& s) const {
  Cache c;
  return forward(s, c);
}

double Actor::forward(const StateVec& s, Cache& c) const {
  c.hidden.resize(hidden_);
  l1_.forward(params_, s.data(), c.hidden.data());
  relu(c.hidden);
  l2_.forward(params_, c.hidden.data(), &c.out_pre);
  c.out = std::tanh(c.out_pre);
  return c.out;
}

void Actor::backward(const StateVec& s, const Cache& c, double dout, std::span<double> grad) const {
  if (grad.size() != params_.size()) throw DimensionError("actor: gradient size mismatch");
  const double g_out = dout * (1.0 - c.out * c.out);
  std::vector<double> g_hidden(hidden_, 0.0);
  l2_.backward(params_, c.hidden.data(), &g_out, grad, g_hidden.data());
  relu_mask(c.hidden, g_hidden);
  l1_.backward(params_, s.data(), g_hidden.data(), grad, nullptr);
}

// ---- critic

Critic::Critic(std::size_t hidden, std::size_t joint) : hidden_(hidden), joint_(joint) {
  if (hidden_ == 0 || joint_ == 0) throw DomainError("critic: layer widths must be positive");
  ls_ = {0, hidden_, kStateDim};
  la_ = {ls_.size(), hidden_, 1};
  lj_ = {la_.offset + la_.size(), joint_, 2 * hidden_};
  lo_ = {lj_.offset + lj_.size(), 1, joint_};
  params_.assign(lo_.offset + lo_.size(), 0.0);
}

const DenseView& Critic::layer(std::size_t i) const {
  switch (i) {
    case 0: return ls_;
    case 1: return la_;
    case 2: return lj_;
    default: return lo_;
  }
}

void Critic::init(Rng& rng, double final_bound) {
  ls_.init_uniform(params_, 1.0 / std::sqrt(static_cast<double>(kStateDim)), rng);
  la_.init_uniform(params_, 1.0, rng);
  lj_.init_uniform(params_, 1.0 / std::sqrt(static_cast<double>(2 * hidden_)), rng);
  lo_.init_uniform(params_, final_bound, rng);
}

double Critic::forward(const StateVec& s, double a) const {
  Cache c;
  return forward(s, a, c);
}

double Critic::forward(const StateVec& s, double a, Cache& c) const {
  c.state_hidden.resize(hidden_);
  c.action_hidden.resize(hidden_);
  c.joint.resize(joint_);
  ls_.forward(params_, s.data(), c.state_hidden.data());
  relu(c.state_hidden);
  la_.forward(params_, &a, c.action_hidden.data());
  relu(c.action_hidden);
  std::vector<double> concat(c.state_hidden);
  concat.insert(concat.end(), c.action_hidden.begin(), c.action_hidden.end());
  lj_.forward(params_, concat.data(), c.joint.data());
  relu(c.joint);
  lo_.forward(params_, c.joint.data(), &c.q);
  return c.q;
}

void Critic::backward(const StateVec& s, double a, const Cache& c, double dq, std::span<double> grad) const {
  if (grad.size() != params_.size()) throw DimensionError("critic: gradient size mismatch");
  std::vector<double> g_joint(joint_, 0.0);
  lo_.backward(params_, c.joint.data(), &dq, grad, g_joint.data());
  relu_mask(c.joint, g_joint);

  std::vector<double> concat(c.state_hidden);
  concat.insert(concat.end(), c.action_hidden.begin(), c.action_hidden.end());
  std::vector<double> g_concat(2 * hidden_, 0.0);
  lj_.backward(params_, concat.data(), g_joint.data(), grad, g_concat.data());

  std::vector<double> g_s(g_concat.begin(), g_concat.begin() + static_cast<std::ptrdiff_t>(hidden_));
  std::vector<double> g_a(g_concat.begin() + static_cast<std::ptrdiff_t>(hidden_), g_concat.end());
  relu_mask(c.state_hidden, g_s);
  relu_mask(c.action_hidden, g_a);
  ls_.backward(params_, s.data(), g_s.data(), grad, nullptr);
  la_.backward(params_, &a, g_a.data(), grad, nullptr);
}

double Critic::action_gradient(const Cache& c) const {
  const auto& k = simd::active();
  const double one = 1.0;
  std::vector<double> g_joint(joint_, 0.0);
  k.matvec_transposed_acc(params_.data() + lo_.offset, &one, g_joint.data(), 1, joint_);
  relu_mask(c.joint, g_joint);
  std::vector<double> g_concat(2 * hidden_, 0.0);
  k.matvec_transposed_acc(params_.data() + lj_.offset, g_joint.data(), g_concat.data(), joint_, 2 * hidden_);
  double da = 0.0;
  for (std::size_t i = 0; i < hidden_; ++i) {
    if (c.action_hidden[i] > 0.0) da += params_[la_.offset + i] * g_concat[hidden_ + i];
  }
  return da;
}

void soft_update(std::span<double> target, std::span<const double> source, double rho) {
  if (target.size() != source.size()) throw DimensionError("soft_update: size mismatch");
  simd::move_toward(target, source, rho);
}

// ---- optimizer

Optimizer::Optimizer(OptimizerKind kind, double rate, std::size_t n, double beta1, double beta2, double eps)
    : kind_(kind), rate_(rate), beta1_(beta1), beta2_(beta2), eps_(eps) {
  if (!(rate_ > 0.0)) throw ConfigError("optimizer: rate must be positive");
  if (kind_ != OptimizerKind::Sgd) m_.assign(n, 0.0);
  if (kind_ == OptimizerKind::Adam) v_.assign(n, 0.0);
}

void Optimizer::descend(std::span<double> params, std::span<const double> grad) {
  if (params.size() != grad.size()) throw DimensionError("optimizer: size mismatch");
  switch (kind_) {
    case OptimizerKind::Sgd:
      simd::axpy(params, grad, -rate_);
      break;
    case OptimizerKind::Momentum:
      if (m_.size() != grad.size()) throw DimensionError("optimizer: size mismatch");
      for (std::size_t i = 0; i < grad.size(); ++i) {
        m_[i] = beta1_ * m_[i] + grad[i];
        params[i] -= rate_ * m_[i];
      }
      break;
    case OptimizerKind::Adam: {
      if (m_.size() != grad.size()) throw DimensionError("optimizer: size mismatch");
      ++t_;
      const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
      const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
      for (std::size_t i = 0; i < grad.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        params[i] -= rate_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
      }
      break;
    }
  }
}

}  // namespace affnego
