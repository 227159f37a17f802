#pragma once

// Finite-section models of compact operators on sequence space.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "cocycle/errors.hpp"
#include "cocycle/linalg.hpp"

namespace cocycle {

enum class CompactKind { diagonal, weighted_shift };
enum class CoefficientFamily { geometric, power };

/// a_i = c * q^i (geometric, |q| < 1) or a_i = c * i^{-p} (power, p > 0), i >= 1.
/// The diagonal kind acts as e_i -> a_i e_i, the weighted shift as e_i -> a_i e_{i+1}.
template <typename Scalar = double>
struct CompactModel {
  CompactKind kind = CompactKind::diagonal;
  CoefficientFamily family = CoefficientFamily::geometric;
  Scalar scale = 1;     // c
  Scalar exponent = 0;  // q for geometric, p for power

  void validate() const {
    if (!std::isfinite(static_cast<double>(scale)) || !std::isfinite(static_cast<double>(exponent)))
      throw InvalidInput("compact model parameters must be finite");
    if (family == CoefficientFamily::geometric && !(std::abs(exponent) < Scalar(1)))
      throw DomainError("geometric family needs |q| < 1 for compactness");
    if (family == CoefficientFamily::power && !(exponent > Scalar(0)))
      throw DomainError("power family needs p > 0 for compactness");
  }

  Scalar coefficient(long i) const {
    if (family == CoefficientFamily::geometric) return scale * std::pow(exponent, Scalar(i));
    return scale * std::pow(Scalar(i), -exponent);
  }

  /// sup_{j >= i} |a_j|; both families have non-increasing |a_j|.
  Scalar tail_bound(long i) const { return std::abs(coefficient(i)); }

  bool operator==(const CompactModel&) const = default;
};

template <typename Scalar = double>
struct Truncation {
  int rank = 0;
  Operator<Scalar> matrix;
  Scalar error = 0;  // operator-norm distance to the full operator
};

/// Leading m x m principal section of the model.
template <typename Scalar>
Truncation<Scalar> truncate(const CompactModel<Scalar>& model, int m) {
  model.validate();
  if (m < 1) {
    std::ostringstream msg;
    msg << "truncation rank must be >= 1, got " << m;
    throw DomainError(msg.str());
  }
  Truncation<Scalar> t;
  t.rank = m;
  t.matrix = Operator<Scalar>::Zero(m, m);
  if (model.kind == CompactKind::diagonal) {
    for (int i = 1; i <= m; ++i) t.matrix(i - 1, i - 1) = model.coefficient(i);
    t.error = model.tail_bound(m + 1);
  } else {
    for (int i = 1; i < m; ++i) t.matrix(i, i - 1) = model.coefficient(i);
    t.error = model.tail_bound(m);
  }
  return t;
}

template <typename Scalar = double>
struct ConvergenceRow {
  int rank;
  Scalar rho;
  Scalar error;
};

template <typename Scalar>
std::vector<ConvergenceRow<Scalar>> spectral_convergence(const CompactModel<Scalar>& model, Scalar s,
                                                         const std::vector<int>& ranks) {
  require_positive_order(s);
  if (ranks.empty()) throw DomainError("rank list is empty");
  for (std::size_t i = 1; i < ranks.size(); ++i)
    if (ranks[i] <= ranks[i - 1]) throw DomainError("ranks must be strictly increasing");
  std::vector<ConvergenceRow<Scalar>> rows;
  rows.reserve(ranks.size());
  for (int m : ranks) {
    const auto t = truncate(model, m);
    rows.push_back({m, rho_s(t.matrix, s), t.error});
  }
  return rows;
}

}  // namespace cocycle
