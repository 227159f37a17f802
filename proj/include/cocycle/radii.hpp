#pragma once

// Two-sided brackets for the s-joint spectral radius of a window cocycle.
//
// upper: a_m = log sup_{|word| = m+w-1} V_s(A^m) is subadditive over word
//        length, so (sup V_s(A^m))^{1/m} >= rho_hat_s for every m and the
//        minimum over m <= n is a certified upper bound.
// lower: every periodic point p of period k gives
//        exp[((s - [s]) r_{[s]+1}(A^k(p)) + (1 - s + [s]) r_{[s]}(A^k(p))) / k]
//        <= rho_bar_s = rho_hat_s, and the max over k <= K is certified.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cocycle/dynamics.hpp"
#include "cocycle/errors.hpp"
#include "cocycle/linalg.hpp"

namespace cocycle {

constexpr double kSandwichTolerance = 1e-9;

template <typename Scalar = double>
struct UpperEstimate {
  Scalar value = 0;
  Word witness;   // argmax word at the minimizing depth
  int depth = 0;  // minimizing number of steps m
};

template <typename Scalar = double>
struct LowerEstimate {
  Scalar value = 0;
  PeriodicOrbit witness;
};

template <typename Scalar = double>
struct RadiusBracket {
  Scalar s = 0;
  int depth = 0;
  int horizon = 0;
  Scalar lower = 0;
  PeriodicOrbit lower_witness;
  Scalar upper = 0;
  Word upper_witness;
  Scalar gap = 0;

  Scalar midpoint() const { return (lower + upper) / 2; }
};

namespace detail {

template <typename Scalar>
bool is_integer_order(Scalar s) {
  return s == std::floor(s);
}

// Compound ranks k whose top modulus products |lambda_1 ... lambda_k| fix
// rho_s of a d x d operator.
template <typename Scalar>
std::vector<int> ranks_for_order(Scalar s, int d) {
  if (s >= Scalar(d)) return {d};
  const int fl = static_cast<int>(std::floor(s));
  if (is_integer_order(s)) return {fl};
  if (fl == 0) return {1};
  return {fl, fl + 1};
}

// Spectral data of products along words, carried in compound coordinates:
// |lambda_1 ... lambda_k| of a product is the dominant eigenvalue modulus of
// the product of k-th compounds, which keeps full relative accuracy when the
// product's smaller eigenvalues have sunk below rounding level.
template <typename Scalar>
class CompoundWalk {
 public:
  CompoundWalk(const WindowCocycle<Scalar>& A, const std::vector<Scalar>& orders)
      : A_(A), top_(A.dim() + 1, Scalar(0)), log_scale_(A.dim() + 1, Scalar(0)) {
    for (Scalar s : orders) {
      for (int k : ranks_for_order(s, A.dim())) {
        if (factors_.count(k)) continue;
        auto& f = factors_[k];
        f.resize(A.slots());
        for (std::size_t i = 0; i < A.slots(); ++i)
          if (A.slot(i).size() != 0) f[i] = compound(A.slot(i), k);
      }
    }
  }

  // Accumulates the products over every window of an admissible word.
  void along(const Word& word) {
    const int steps = static_cast<int>(word.size()) - A_.window() + 1;
    for (const auto& [k, f] : factors_) {
      const auto rows = f[A_.window_index(word.symbols.begin())].rows();
      Operator<Scalar> m = Operator<Scalar>::Identity(rows, rows);
      Scalar log_scale = 0;
      for (int i = 0; i < steps; ++i) {
        m = (f[A_.window_index(word.symbols.begin() + i)] * m).eval();
        // Rescale only near the ends of the exponent range.
        const Scalar nrm = m.norm();
        if (nrm > Scalar(0) && (nrm > Scalar(1e64) || nrm < Scalar(1e-64))) {
          m /= nrm;
          log_scale += std::log(nrm);
        }
      }
      top_[k] = eigenvalues(m).cwiseAbs().maxCoeff();
      log_scale_[k] = log_scale;
    }
  }

  // rho_s(A^steps)^{1/steps} for the last word passed to along().
  Scalar per_step(Scalar s, int steps) const {
    const int d = A_.dim();
    const Scalar inv = Scalar(1) / Scalar(steps);
    if (s >= Scalar(d)) return top_power(d, s / Scalar(d) * inv);
    const Scalar fl = std::floor(s);
    const int k = static_cast<int>(fl);
    if (s == fl) return top_power(k, inv);
    Scalar v = top_power(k + 1, (s - fl) * inv);
    if (k > 0) v *= top_power(k, (Scalar(1) - s + fl) * inv);
    return v;
  }

 private:
  // |lambda_1 ... lambda_k|^e of the accumulated product.
  Scalar top_power(int k, Scalar e) const {
    const Scalar p = std::pow(top_[k], e);
    return log_scale_[k] == Scalar(0) ? p : p * std::exp(log_scale_[k] * e);
  }

  const WindowCocycle<Scalar>& A_;
  std::map<int, std::vector<Operator<Scalar>>> factors_;
  std::vector<Scalar> top_;
  std::vector<Scalar> log_scale_;
};

template <typename Scalar>
void require_orders(const std::vector<Scalar>& orders) {
  if (orders.empty()) throw DomainError("no orders s requested");
  for (Scalar s : orders) require_positive_order(s);
}

}  // namespace detail

/// Upper estimates for several orders from a single enumeration of words.
template <typename Scalar>
std::vector<UpperEstimate<Scalar>> upper_estimates(const WindowCocycle<Scalar>& A, const std::vector<Scalar>& orders,
                                                   int n) {
  detail::require_orders(orders);
  if (n < 1) throw DomainError("depth n must be >= 1");
  const auto& shift = A.shift();
  const int w = A.window();
  const std::size_t ns = orders.size();

  // best[m-1][i]: sup over (m+w-1)-words of V_{s_i}(A^m), with witness.
  std::vector<std::vector<Scalar>> best(n, std::vector<Scalar>(ns, Scalar(-1)));
  std::vector<std::vector<Word>> witness(n, std::vector<Word>(ns));

  Word word;
  word.symbols.reserve(n + w - 1);
  std::vector<Operator<Scalar>> products(n + 1);
  products[0] = Operator<Scalar>::Identity(A.dim(), A.dim());

  // Extends a word that currently carries `steps` window factors.
  auto extend = [&](auto&& self, int steps) -> void {
    for (int b = 0; b < shift.alphabet(); ++b) {
      if (!word.empty() && !shift.allowed(word.symbols.back(), b)) continue;
      word.symbols.push_back(b);
      const auto& factor = A.at_window(word.symbols.end() - w);
      products[steps + 1].noalias() = factor * products[steps];
      const auto sigma = singular_values(products[steps + 1]).values;
      for (std::size_t i = 0; i < ns; ++i) {
        const Scalar v = detail::spectral_function(sigma, orders[i]);
        if (v > best[steps][i]) {
          best[steps][i] = v;
          witness[steps][i] = word;
        }
      }
      if (steps + 1 < n) self(self, steps + 1);
      word.symbols.pop_back();
    }
  };

  if (w == 1) {
    extend(extend, 0);
  } else {
    for_each_admissible_word(shift, w - 1, [&](const Word& prefix) {
      word = prefix;
      extend(extend, 0);
    });
  }

  std::vector<UpperEstimate<Scalar>> out(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    out[i].value = std::numeric_limits<Scalar>::infinity();
    for (int m = 1; m <= n; ++m) {
      const Scalar root = std::pow(best[m - 1][i], Scalar(1) / Scalar(m));
      if (root < out[i].value) {
        out[i].value = root;
        out[i].witness = witness[m - 1][i];
        out[i].depth = m;
      }
    }
  }
  return out;
}

template <typename Scalar>
UpperEstimate<Scalar> upper_estimate(const WindowCocycle<Scalar>& A, Scalar s, int n) {
  return upper_estimates(A, std::vector<Scalar>{s}, n).front();
}

/// Lower estimates for several orders from one enumeration of periodic orbits
/// of period <= K. Ties go to the lexicographically smallest cycle word.
template <typename Scalar>
std::vector<LowerEstimate<Scalar>> lower_estimates(const WindowCocycle<Scalar>& A, const std::vector<Scalar>& orders,
                                                   int K) {
  detail::require_orders(orders);
  if (K < 1) throw DomainError("orbit horizon K must be >= 1");
  std::vector<LowerEstimate<Scalar>> out(orders.size(), LowerEstimate<Scalar>{Scalar(-1), {}});
  detail::CompoundWalk<Scalar> walk(A, orders);
  for (int k = 1; k <= K; ++k) {
    for_each_periodic_orbit(A.shift(), k, [&](const PeriodicOrbit& p) {
      walk.along(unroll(p, 1, A.window()));
      for (std::size_t i = 0; i < orders.size(); ++i) {
        const Scalar v = walk.per_step(orders[i], k);
        if (v > out[i].value || (v == out[i].value && p.cycle < out[i].witness.cycle)) {
          out[i].value = v;
          out[i].witness = p;
        }
      }
    });
  }
  return out;
}

/// Contribution of a single periodic orbit to lower_estimate.
template <typename Scalar>
Scalar periodic_lower_contribution(const WindowCocycle<Scalar>& A, const PeriodicOrbit& p, Scalar s) {
  require_positive_order(s);
  if (!A.shift().cyclically_admissible(p.cycle))
    throw DomainError("cycle \"" + to_string(p.cycle) + "\" is not cyclically admissible");
  detail::CompoundWalk<Scalar> walk(A, {s});
  walk.along(unroll(p, 1, A.window()));
  return walk.per_step(s, p.period());
}

template <typename Scalar>
LowerEstimate<Scalar> lower_estimate(const WindowCocycle<Scalar>& A, Scalar s, int K) {
  return lower_estimates(A, std::vector<Scalar>{s}, K).front();
}

template <typename Scalar>
RadiusBracket<Scalar> make_bracket(Scalar s, int n, int K, const LowerEstimate<Scalar>& lo,
                                   const UpperEstimate<Scalar>& up) {
  if (lo.value > up.value * (1 + Scalar(kSandwichTolerance))) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "bracket inverted at s=" << s << ": lower " << lo.value << " (cycle " << to_string(lo.witness.cycle)
        << ") exceeds upper " << up.value << " (word " << to_string(up.witness) << ")";
    throw ConsistencyError(msg.str());
  }
  return RadiusBracket<Scalar>{s, n, K, lo.value, lo.witness, up.value, up.witness, up.value - lo.value};
}

template <typename Scalar>
std::vector<RadiusBracket<Scalar>> brackets(const WindowCocycle<Scalar>& A, const std::vector<Scalar>& orders, int n,
                                            int K) {
  const auto up = upper_estimates(A, orders, n);
  const auto lo = lower_estimates(A, orders, K);
  std::vector<RadiusBracket<Scalar>> out;
  out.reserve(orders.size());
  for (std::size_t i = 0; i < orders.size(); ++i) out.push_back(make_bracket(orders[i], n, K, lo[i], up[i]));
  return out;
}

template <typename Scalar>
RadiusBracket<Scalar> bracket(const WindowCocycle<Scalar>& A, Scalar s, int n, int K) {
  return brackets(A, std::vector<Scalar>{s}, n, K).front();
}

/// sup_{k <= K, p in Fix(f^k)} rho_s(A^{nk}(p))^{1/(nk)}, with the nk-step
/// product accumulated along the unrolled orbit. At n = 1 this runs the same
/// arithmetic as lower_estimate.
template <typename Scalar>
Scalar corollary_estimate(const WindowCocycle<Scalar>& A, Scalar s, int n, int K) {
  require_positive_order(s);
  if (n < 1 || K < 1) throw DomainError("n and K must be >= 1");
  Scalar best = -1;
  detail::CompoundWalk<Scalar> walk(A, {s});
  for (int k = 1; k <= K; ++k) {
    for_each_periodic_orbit(A.shift(), k, [&](const PeriodicOrbit& p) {
      walk.along(unroll(p, n, A.window()));
      best = std::max(best, walk.per_step(s, n * k));
    });
  }
  return best;
}

/// (1/k) r_s(A^k(p)): the sum of the top-s Lyapunov exponents of the
/// orbit measure of p. May be -inf.
template <typename Scalar>
Scalar lyapunov_sum_periodic(const WindowCocycle<Scalar>& A, const PeriodicOrbit& p, Scalar s) {
  return r_s(cycle_product(A, p), s) / Scalar(p.period());
}

template <typename Scalar = double>
struct KingmanPoint {
  int n;
  Scalar value;  // (1/n) log V_s(A^n(x)), possibly -inf
};

namespace detail {

// log V_k(A^n(x)) for every n <= n_max along a trajectory, as the log norm of
// a product of k-th compounds. Renormalising each step keeps the top singular
// value of the compound product at full relative accuracy even when the
// singular values of A^n(x) itself span many orders of magnitude.
template <typename Scalar>
std::vector<Scalar> log_volume_along(const WindowCocycle<Scalar>& A, const Word& trajectory, int k, int n_max) {
  std::vector<Scalar> out(n_max + 1, neg_infinity<Scalar>());
  std::vector<Operator<Scalar>> factors(A.slots());
  for (std::size_t i = 0; i < A.slots(); ++i)
    if (A.slot(i).size() != 0) factors[i] = compound(A.slot(i), k);
  const auto rows = factors[A.window_index(trajectory.symbols.begin())].rows();
  Operator<Scalar> m = Operator<Scalar>::Identity(rows, rows);
  Scalar log_scale = 0;
  for (int step = 1; step <= n_max; ++step) {
    m = (factors[A.window_index(trajectory.symbols.begin() + (step - 1))] * m).eval();
    const Scalar nrm = m.norm();
    if (nrm == Scalar(0)) break;
    m /= nrm;
    log_scale += std::log(nrm);
    out[step] = log_scale + std::log(singular_values(m)(1));
  }
  return out;
}

}  // namespace detail

/// Finite-n subadditive averages (1/n) log V_s(A^n(x)) along a trajectory.
template <typename Scalar>
std::vector<KingmanPoint<Scalar>> kingman_estimate(const WindowCocycle<Scalar>& A, const Word& trajectory, Scalar s,
                                                   std::vector<int> checkpoints) {
  require_positive_order(s);
  if (checkpoints.empty()) throw DomainError("no checkpoints requested");
  for (int n : checkpoints)
    if (n < 1) throw DomainError("checkpoints must be >= 1");
  const int n_max = *std::max_element(checkpoints.begin(), checkpoints.end());
  const int w = A.window();
  if (static_cast<long>(trajectory.size()) < static_cast<long>(n_max) + w - 1) {
    std::ostringstream msg;
    msg << "trajectory of length " << trajectory.size() << " is too short for " << n_max << " steps";
    throw DomainError(msg.str());
  }
  if (!A.shift().admissible(trajectory)) throw DomainError("trajectory is not admissible");

  // log V_s = (s - [s]) log V_{[s]+1} + (1 - s + [s]) log V_{[s]} for s < d,
  // and (s/d) log V_d for s >= d.
  const int d = A.dim();
  std::vector<std::pair<int, Scalar>> terms;
  if (s >= Scalar(d)) {
    terms.emplace_back(d, s / Scalar(d));
  } else {
    const int k = static_cast<int>(std::floor(s));
    if (s > Scalar(k)) terms.emplace_back(k + 1, s - Scalar(k));
    if (k > 0) terms.emplace_back(k, Scalar(1) - s + Scalar(k));
  }
  std::vector<Scalar> total(n_max + 1, Scalar(0));
  for (const auto& [k, weight] : terms) {
    const auto logs = detail::log_volume_along(A, trajectory, k, n_max);
    for (int n = 1; n <= n_max; ++n) total[n] += weight * logs[n];
  }
  std::vector<KingmanPoint<Scalar>> out;
  out.reserve(checkpoints.size());
  for (int n : checkpoints) out.push_back({n, total[n] / Scalar(n)});
  return out;
}

template <typename Scalar = double>
struct ContinuityRow {
  Scalar eps;
  RadiusBracket<Scalar> bracket;
  Scalar drift;             // |midpoint(eps) - midpoint(0)|
  Scalar holder_distance;   // eps * ||B||_alpha
};

template <typename Scalar = double>
struct ContinuityReport {
  RadiusBracket<Scalar> reference;
  std::vector<ContinuityRow<Scalar>> rows;
};

/// Brackets along the segment eps -> A + eps B for decreasing eps.
template <typename Scalar>
ContinuityReport<Scalar> continuity_probe(const WindowCocycle<Scalar>& A, const WindowCocycle<Scalar>& B, Scalar alpha,
                                          Scalar s, int n, int K, const std::vector<Scalar>& epsilons) {
  if (!A.same_shape(B)) throw InvalidInput("direction must share subshift, window and dim with the cocycle");
  if (epsilons.empty()) throw DomainError("no epsilons given");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0)) throw DomainError("epsilons must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw DomainError("epsilons must be strictly decreasing");
  }
  const Scalar direction_norm = holder_norm(B, alpha);
  ContinuityReport<Scalar> report{bracket(A, s, n, K), {}};
  for (Scalar eps : epsilons) {
    auto b = bracket(A.perturbed(B, eps), s, n, K);
    const Scalar drift = std::abs(b.midpoint() - report.reference.midpoint());
    report.rows.push_back({eps, std::move(b), drift, eps * direction_norm});
  }
  return report;
}

template <typename Scalar = double>
struct LevelSetResult {
  Scalar s_low;
  Scalar s_high;
  RadiusBracket<Scalar> at_low;
  RadiusBracket<Scalar> at_high;
};

/// Bisection on s for midpoint(bracket(s)) = theta. Requires the bracket
/// midpoint above theta at s_min and below it at s_max.
template <typename Scalar>
LevelSetResult<Scalar> find_s_for_level(const WindowCocycle<Scalar>& A, Scalar theta, int n, int K, Scalar tolerance,
                                        Scalar s_min, Scalar s_max) {
  if (!(theta > 0)) throw DomainError("level theta must be positive");
  if (!(tolerance > 0)) throw DomainError("tolerance must be positive");
  require_positive_order(s_min);
  if (!(s_max > s_min)) throw DomainError("need s_min < s_max");

  auto lo = bracket(A, s_min, n, K);
  auto hi = bracket(A, s_max, n, K);
  if (!(lo.midpoint() > theta) || !(hi.midpoint() < theta)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "no sign change: midpoint " << lo.midpoint() << " at s=" << s_min << ", " << hi.midpoint()
        << " at s=" << s_max << ", level " << theta;
    throw DomainError(msg.str());
  }
  Scalar a = s_min, b = s_max;
  while (b - a > tolerance) {
    const Scalar mid = (a + b) / 2;
    auto probe = bracket(A, mid, n, K);
    const Scalar slack = Scalar(kSandwichTolerance) * lo.midpoint();
    if (probe.midpoint() > lo.midpoint() + slack || probe.midpoint() < hi.midpoint() - slack) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "non-monotone samples: midpoint " << probe.midpoint() << " at s=" << mid << " is outside ["
          << hi.midpoint() << ", " << lo.midpoint() << "] spanned by s in [" << a << ", " << b << "]";
      throw NumericError(msg.str());
    }
    if (probe.midpoint() > theta) {
      a = mid;
      lo = std::move(probe);
    } else {
      b = mid;
      hi = std::move(probe);
    }
  }
  return {a, b, std::move(lo), std::move(hi)};
}

}  // namespace cocycle
