#pragma once

// Subshifts of finite type, words and periodic orbits, and locally constant
// (window) cocycles over them.

#include <algorithm>
#include <compare>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cocycle/errors.hpp"
#include "cocycle/linalg.hpp"

namespace cocycle {

constexpr int kMaxAlphabet = 36;

inline char symbol_char(int a) {
  return static_cast<char>(a < 10 ? '0' + a : 'a' + (a - 10));
}

inline int symbol_index(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'z') return c - 'a' + 10;
  return -1;
}

struct Word {
  std::vector<int> symbols;

  std::size_t size() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }
  int operator[](std::size_t i) const { return symbols[i]; }

  auto operator<=>(const Word&) const = default;
};

inline std::string to_string(const Word& w) {
  std::string out;
  out.reserve(w.size());
  for (int a : w.symbols) out.push_back(symbol_char(a));
  return out;
}

/// Parses "0120" style words; throws InvalidInput on characters outside 0-9a-z.
inline Word parse_word(std::string_view text) {
  Word w;
  for (char c : text) {
    const int a = symbol_index(c);
    if (a < 0) throw InvalidInput("invalid symbol '" + std::string(1, c) + "' in word \"" + std::string(text) + "\"");
    w.symbols.push_back(a);
  }
  return w;
}

/// Two-sided subshift of finite type on the alphabet {0, ..., q-1}.
class Subshift {
 public:
  using Transition = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

  explicit Subshift(Transition transition) : transition_(std::move(transition)) {
    const auto q = transition_.rows();
    if (q < 1 || q != transition_.cols()) throw InvalidInput("transition matrix must be square and non-empty");
    if (q > kMaxAlphabet) throw InvalidInput("alphabet size exceeds 36 symbols");
    for (Eigen::Index a = 0; a < q; ++a)
      for (Eigen::Index b = 0; b < q; ++b)
        if (transition_(a, b) != 0 && transition_(a, b) != 1)
          throw InvalidInput("transition entries must be 0 or 1");
    for (Eigen::Index a = 0; a < q; ++a) {
      if (transition_.row(a).sum() == 0)
        throw InvalidInput("symbol " + std::string(1, symbol_char(int(a))) + " has no allowed successor");
      if (transition_.col(a).sum() == 0)
        throw InvalidInput("symbol " + std::string(1, symbol_char(int(a))) + " has no allowed predecessor");
    }
  }

  static Subshift full(int q) {
    if (q < 1) throw InvalidInput("alphabet size must be >= 1");
    return Subshift(Transition::Ones(q, q));
  }

  int alphabet() const { return static_cast<int>(transition_.rows()); }
  const Transition& transition() const { return transition_; }
  bool allowed(int a, int b) const { return transition_(a, b) == 1; }
  bool is_full() const { return (transition_.array() == 1).all(); }

  bool admissible(const Word& w) const {
    for (int a : w.symbols)
      if (a < 0 || a >= alphabet()) return false;
    for (std::size_t i = 1; i < w.size(); ++i)
      if (!allowed(w[i - 1], w[i])) return false;
    return true;
  }

  bool cyclically_admissible(const Word& w) const {
    return !w.empty() && admissible(w) && allowed(w.symbols.back(), w.symbols.front());
  }

  /// |Fix(f^k)| = trace(transition^k).
  long fixed_point_count(int k) const {
    Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic> t = transition_.cast<long>();
    Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic> p = t;
    for (int i = 1; i < k; ++i) p = (p * t).eval();
    return p.trace();
  }

  bool operator==(const Subshift& other) const { return transition_ == other.transition_; }

 private:
  Transition transition_;
};

/// Visits every admissible word of length n in lexicographic order.
/// The visitor receives a reference that is only valid during the call.
template <typename Visitor>
void for_each_admissible_word(const Subshift& shift, int n, Visitor&& visit) {
  if (n < 1) return;
  Word w;
  w.symbols.reserve(n);
  std::function<void()> extend = [&]() {
    if (static_cast<int>(w.size()) == n) {
      visit(std::as_const(w));
      return;
    }
    for (int b = 0; b < shift.alphabet(); ++b) {
      if (!w.empty() && !shift.allowed(w.symbols.back(), b)) continue;
      w.symbols.push_back(b);
      extend();
      w.symbols.pop_back();
    }
  };
  extend();
}

inline std::vector<Word> admissible_words(const Subshift& shift, int n) {
  if (n < 1) throw DomainError("word length must be >= 1");
  std::vector<Word> out;
  for_each_admissible_word(shift, n, [&](const Word& w) { out.push_back(w); });
  return out;
}

/// A periodic point p with f^k(p) = p, represented by its length-k cycle word.
struct PeriodicOrbit {
  Word cycle;

  int period() const { return static_cast<int>(cycle.size()); }
  auto operator<=>(const PeriodicOrbit&) const = default;
};

inline bool is_primitive(const Word& w) {
  const std::size_t k = w.size();
  for (std::size_t d = 1; d < k; ++d) {
    if (k % d != 0) continue;
    bool repeats = true;
    for (std::size_t i = d; i < k && repeats; ++i) repeats = w[i] == w[i - d];
    if (repeats) return false;
  }
  return true;
}

/// All cyclically admissible words of length k, i.e. the points of Fix(f^k),
/// in lexicographic order. With primitive_only, repeated shorter cycles are dropped.
template <typename Visitor>
void for_each_periodic_orbit(const Subshift& shift, int k, Visitor&& visit, bool primitive_only = false) {
  for_each_admissible_word(shift, k, [&](const Word& w) {
    if (!shift.allowed(w.symbols.back(), w.symbols.front())) return;
    if (primitive_only && !is_primitive(w)) return;
    visit(PeriodicOrbit{w});
  });
}

inline std::vector<PeriodicOrbit> periodic_orbits(const Subshift& shift, int k, bool primitive_only = false) {
  if (k < 1) throw DomainError("period must be >= 1");
  std::vector<PeriodicOrbit> out;
  for_each_periodic_orbit(shift, k, [&](PeriodicOrbit p) { out.push_back(std::move(p)); }, primitive_only);
  return out;
}

/// Locally constant operator-valued map A(x) = table[x_0 ... x_{w-1}] over a subshift.
template <typename Scalar = double>
class WindowCocycle {
 public:
  using Matrix = Operator<Scalar>;

  WindowCocycle(Subshift shift, int window, const std::map<Word, Matrix>& table, Scalar alpha = 1)
      : shift_(std::move(shift)), window_(window), alpha_(alpha) {
    if (window_ < 1) throw InvalidInput("window must be >= 1");
    if (!(alpha_ > 0)) throw DomainError("Hoelder exponent must be positive");
    long slots = 1;
    for (int i = 0; i < window_; ++i) {
      slots *= shift_.alphabet();
      if (slots > (1L << 24)) throw InvalidInput("window table too large");
    }
    table_.assign(slots, Matrix());
    for (const auto& [word, op] : table) {
      if (static_cast<int>(word.size()) != window_)
        throw InvalidInput("operator key \"" + to_string(word) + "\" has length != window");
      if (!shift_.admissible(word))
        throw InvalidInput("operator key \"" + to_string(word) + "\" is not an admissible word");
      require_valid(op);
      if (dim_ == 0) dim_ = static_cast<int>(op.rows());
      if (op.rows() != dim_) throw InvalidInput("operator \"" + to_string(word) + "\" has inconsistent dimension");
      table_[code(word.symbols.begin())] = op;
    }
    for_each_admissible_word(shift_, window_, [&](const Word& w) {
      if (table_[code(w.symbols.begin())].size() == 0)
        throw InvalidInput("missing operator for admissible window \"" + to_string(w) + "\"");
    });
  }

  /// A(x) = T for every x.
  static WindowCocycle constant(Subshift shift, const Matrix& T, Scalar alpha = 1) {
    std::map<Word, Matrix> table;
    for_each_admissible_word(shift, 1, [&](const Word& w) { table.emplace(w, T); });
    return WindowCocycle(std::move(shift), 1, table, alpha);
  }

  const Subshift& shift() const { return shift_; }
  int window() const { return window_; }
  int dim() const { return dim_; }
  Scalar alpha() const { return alpha_; }

  const Matrix& at(const Word& window_word) const {
    if (static_cast<int>(window_word.size()) != window_ || !shift_.admissible(window_word))
      throw DomainError("\"" + to_string(window_word) + "\" is not an admissible window");
    return table_[code(window_word.symbols.begin())];
  }

  /// Value of A on the window starting at `first`; the caller guarantees admissibility.
  template <typename It>
  const Matrix& at_window(It first) const {
    return table_[code(first)];
  }

  std::map<Word, Matrix> table() const {
    std::map<Word, Matrix> out;
    for_each_admissible_word(shift_, window_, [&](const Word& w) { out.emplace(w, table_[code(w.symbols.begin())]); });
    return out;
  }

  bool same_shape(const WindowCocycle& other) const {
    return shift_ == other.shift_ && window_ == other.window_ && dim_ == other.dim_;
  }

  /// x -> A(x) + eps * B(x).
  WindowCocycle perturbed(const WindowCocycle& direction, Scalar eps) const {
    if (!same_shape(direction)) throw InvalidInput("perturbation direction has a different subshift, window or dim");
    auto t = table();
    for (auto& [word, op] : t) op += eps * direction.at(word);
    return WindowCocycle(shift_, window_, t, alpha_);
  }

  WindowCocycle scaled(Scalar c) const {
    auto t = table();
    for (auto& entry : t) entry.second *= c;
    return WindowCocycle(shift_, window_, t, alpha_);
  }

  /// The same map re-encoded with window w+1, ignoring the extra coordinate.
  WindowCocycle widened() const {
    std::map<Word, Matrix> t;
    for_each_admissible_word(shift_, window_ + 1, [&](const Word& w) {
      t.emplace(w, table_[code(w.symbols.begin())]);
    });
    return WindowCocycle(shift_, window_ + 1, t, alpha_);
  }

  bool operator==(const WindowCocycle& other) const {
    return same_shape(other) && alpha_ == other.alpha_ && table_ == other.table_;
  }

  /// Base-q code of the window starting at `first`, in [0, q^w).
  template <typename It>
  std::size_t window_index(It first) const {
    return code(first);
  }
  std::size_t slots() const { return table_.size(); }
  const Matrix& slot(std::size_t index) const { return table_[index]; }

 private:
  template <typename It>
  std::size_t code(It first) const {
    std::size_t c = 0;
    for (int i = 0; i < window_; ++i, ++first) c = c * shift_.alphabet() + static_cast<std::size_t>(*first);
    return c;
  }

  Subshift shift_;
  int window_;
  int dim_ = 0;
  Scalar alpha_;
  std::vector<Matrix> table_;  // indexed by base-q window code; empty when inadmissible
};

/// A^n(x) = A(f^{n-1}x) ... A(fx) A(x) for the n = |word| - w + 1 windows of
/// `word`, rightmost factor first.
template <typename Scalar>
Operator<Scalar> cocycle_product(const WindowCocycle<Scalar>& A, const Word& word) {
  const int w = A.window();
  if (static_cast<int>(word.size()) < w - 1)
    throw DomainError("word \"" + to_string(word) + "\" is shorter than window - 1");
  if (!A.shift().admissible(word)) throw DomainError("word \"" + to_string(word) + "\" is not admissible");
  Operator<Scalar> product = Operator<Scalar>::Identity(A.dim(), A.dim());
  const int steps = static_cast<int>(word.size()) - w + 1;
  for (int i = 0; i < steps; ++i) product = (A.at_window(word.symbols.begin() + i) * product).eval();
  return product;
}

/// The word p p ... p truncated to the n*k + w - 1 symbols needed for n*k steps.
inline Word unroll(const PeriodicOrbit& p, int repetitions, int window) {
  const std::size_t k = p.cycle.size();
  Word out;
  const std::size_t len = k * static_cast<std::size_t>(repetitions) + static_cast<std::size_t>(window) - 1;
  out.symbols.reserve(len);
  for (std::size_t i = 0; i < len; ++i) out.symbols.push_back(p.cycle[i % k]);
  return out;
}

/// A^k(p) for the periodic point with cycle word p; windows wrap around the cycle.
template <typename Scalar>
Operator<Scalar> cycle_product(const WindowCocycle<Scalar>& A, const PeriodicOrbit& p) {
  if (!A.shift().cyclically_admissible(p.cycle))
    throw DomainError("cycle \"" + to_string(p.cycle) + "\" is not cyclically admissible");
  const int w = A.window();
  const int k = p.period();
  std::vector<int> window(w);
  Operator<Scalar> product = Operator<Scalar>::Identity(A.dim(), A.dim());
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < w; ++j) window[j] = p.cycle[(i + j) % k];
    product = (A.at_window(window.begin()) * product).eval();
  }
  return product;
}

/// sup_x ||A(x)|| + sup_{x != y} ||A(x) - A(y)|| / d(x, y)^alpha with the shift
/// metric d(x, y) = 2^{-min{|i| : x_i != y_i}}; norms are spectral norms.
template <typename Scalar>
Scalar holder_norm(const WindowCocycle<Scalar>& A, Scalar alpha) {
  if (!(alpha > 0)) throw DomainError("Hoelder exponent must be positive");
  const auto table = A.table();
  Scalar sup_norm = 0;
  Scalar seminorm = 0;
  for (auto it = table.begin(); it != table.end(); ++it) {
    sup_norm = std::max(sup_norm, singular_values(it->second)(1));
    for (auto jt = std::next(it); jt != table.end(); ++jt) {
      int sep = 0;
      while (it->first[sep] == jt->first[sep]) ++sep;
      const Scalar diff = singular_values(Operator<Scalar>(it->second - jt->second))(1);
      seminorm = std::max(seminorm, diff * std::pow(Scalar(2), alpha * Scalar(sep)));
    }
  }
  return sup_norm + seminorm;
}

/// Stationary row vector of a row-stochastic matrix.
template <typename Scalar>
Vector<Scalar> stationary_distribution(const Operator<Scalar>& weights) {
  const auto q = weights.rows();
  Operator<Scalar> system = weights.transpose() - Operator<Scalar>::Identity(q, q);
  system.row(q - 1).setOnes();
  Vector<Scalar> rhs = Vector<Scalar>::Zero(q);
  rhs(q - 1) = 1;
  Vector<Scalar> pi = system.completeOrthogonalDecomposition().solve(rhs);
  pi = pi.cwiseMax(Scalar(0));
  return pi / pi.sum();
}

/// A length-n admissible word drawn from the stationary Markov measure with
/// the given transition weights.
template <typename Scalar>
Word sample_trajectory(const Subshift& shift, const Operator<Scalar>& weights, int n, std::uint64_t seed) {
  const int q = shift.alphabet();
  if (n < 1) throw DomainError("trajectory length must be >= 1");
  if (weights.rows() != q || weights.cols() != q) throw DomainError("weights must be q x q");
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      const Scalar wab = weights(a, b);
      if (!std::isfinite(static_cast<double>(wab)) || wab < 0) throw DomainError("weights must be finite and non-negative");
      if ((wab > 0) != shift.allowed(a, b)) throw DomainError("weights must vanish exactly on forbidden transitions");
    }
    if (std::abs(weights.row(a).sum() - Scalar(1)) > Scalar(1e-12)) throw DomainError("weights must be row-stochastic");
  }
  const Vector<Scalar> pi = stationary_distribution(weights);
  std::mt19937_64 rng(seed);
  auto draw = [&rng](const auto& probs) {
    std::vector<double> p(probs.size());
    for (Eigen::Index i = 0; i < probs.size(); ++i) p[i] = static_cast<double>(probs(i));
    std::discrete_distribution<int> dist(p.begin(), p.end());
    return dist(rng);
  };
  Word w;
  w.symbols.reserve(n);
  w.symbols.push_back(draw(pi));
  for (int i = 1; i < n; ++i) w.symbols.push_back(draw(weights.row(w.symbols.back()).transpose()));
  return w;
}

/// Uniform weights over the allowed successors of each symbol.
inline Operator<double> uniform_weights(const Subshift& shift) {
  Operator<double> w = shift.transition().cast<double>();
  for (Eigen::Index a = 0; a < w.rows(); ++a) w.row(a) /= w.row(a).sum();
  return w;
}

}  // namespace cocycle
