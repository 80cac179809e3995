#pragma once

#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

#include "l0forge/support.hpp"
#include "l0forge/types.hpp"

namespace l0forge {

/// Pairs with <S,Y> below this multiple of ||S|| ||Y|| are dropped.
inline constexpr double kCurvatureFloor = 1e-12;

/// Limited-memory BFGS state realizing the inverse-Hessian approximation
/// applied by the variable-metric step. Value type: operations return new
/// states.
class MetricState {
 public:
  struct Pair {
    Vector s;
    Vector y;
    double sy;  // <s, y>, cached for the two-loop recursion
  };

  MetricState() = default;
  MetricState(int capacity, double damping,
              std::optional<long> freeze_after = std::nullopt)
      : capacity_(capacity), damping_(damping), freeze_after_(freeze_after) {
    if (capacity < 0) throw std::invalid_argument("MetricState: negative capacity");
    if (!(damping > 0.0)) throw std::invalid_argument("MetricState: damping must be > 0");
  }

  int capacity() const { return capacity_; }
  double damping() const { return damping_; }
  bool frozen() const { return frozen_; }
  std::optional<long> freeze_after() const { return freeze_after_; }
  const std::deque<Pair>& memory() const { return memory_; }

  friend MetricState push_pair(MetricState state, const Vector& s, const Vector& y);
  friend MetricState maybe_freeze(MetricState state, long k);

 private:
  std::deque<Pair> memory_;
  int capacity_ = 6;
  double damping_ = 1e-6;
  bool frozen_ = false;
  std::optional<long> freeze_after_;
};

/// Appends the pair when the curvature condition holds; FIFO eviction at
/// capacity. A push on a frozen state is a no-op.
inline MetricState push_pair(MetricState state, const Vector& s, const Vector& y) {
  if (s.size() != y.size())
    throw std::invalid_argument("push_pair: dimension mismatch");
  if (state.frozen_ || state.capacity_ == 0) return state;
  const double sy = s.dot(y);
  if (sy <= kCurvatureFloor * s.norm() * y.norm()) return state;
  state.memory_.push_back({s, y, sy});
  while (static_cast<int>(state.memory_.size()) > state.capacity_)
    state.memory_.pop_front();
  return state;
}

/// Freezes the memory once k reaches the configured iteration; idempotent.
inline MetricState maybe_freeze(MetricState state, long k) {
  if (state.freeze_after_ && k >= *state.freeze_after_) state.frozen_ = true;
  return state;
}

/// Two-loop recursion: returns H_k g where H_k is the L-BFGS inverse-Hessian
/// approximation seeded with the scaled identity <S,Y>/<Y,Y> of the newest
/// pair (plain identity when the memory is empty).
inline Vector apply_metric(const MetricState& state, const Vector& g) {
  const auto& mem = state.memory();
  if (mem.empty()) return g;

  std::vector<double> alpha(mem.size());
  Vector q = g;
  for (std::size_t i = mem.size(); i-- > 0;) {
    const auto& p = mem[i];
    alpha[i] = p.s.dot(q) / p.sy;
    q -= alpha[i] * p.y;
  }
  const auto& last = mem.back();
  q *= last.sy / last.y.squaredNorm();
  for (std::size_t i = 0; i < mem.size(); ++i) {
    const auto& p = mem[i];
    const double beta = p.y.dot(q) / p.sy;
    q += (alpha[i] - beta) * p.s;
  }
  return q;
}

/// Support-restricted quasi-Newton direction:
/// -P_s( H_k P_s(grad) ), which lies in C_s exactly.
inline Vector restricted_direction(const MetricState& state, const Vector& grad,
                                   const SupportSet& s) {
  return -project_support(apply_metric(state, project_support(grad, s)), s);
}

}  // namespace l0forge
