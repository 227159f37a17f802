#pragma once

// Spectral primitives on finite-dimensional operators.
//
// All subspace suprema are taken in Euclidean coordinates, where the
// Kolmogorov and Gelfand numbers of T both equal the singular values and
// the k-dimensional volume growth is V_k(T) = sigma_1 ... sigma_k.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cocycle/errors.hpp"

namespace cocycle {

template <typename Scalar>
using Operator = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
constexpr Scalar neg_infinity() {
  return -std::numeric_limits<Scalar>::infinity();
}

/// Throws InvalidInput unless T is a non-empty square matrix of finite entries.
template <typename Derived>
void require_valid(const Eigen::MatrixBase<Derived>& T) {
  if (T.rows() < 1 || T.rows() != T.cols()) {
    std::ostringstream msg;
    msg << "operator must be square with dim >= 1, got " << T.rows() << "x" << T.cols();
    throw InvalidInput(msg.str());
  }
  if (!T.allFinite()) throw InvalidInput("operator has non-finite entries");
}

template <typename Scalar>
void require_positive_order(Scalar s) {
  if (!(s > Scalar(0)) || !std::isfinite(static_cast<double>(s))) {
    std::ostringstream msg;
    msg << "order s must be a finite positive real, got " << s;
    throw DomainError(msg.str());
  }
}

template <typename Scalar>
struct SingularSpectrum {
  Vector<Scalar> values;  // non-increasing, non-negative

  Eigen::Index dim() const { return values.size(); }
  /// sigma_k with 1-based k.
  Scalar operator()(Eigen::Index k) const { return values(k - 1); }
};

template <typename Scalar>
struct EigenModuli {
  std::vector<Scalar> moduli;       // distinct moduli, descending
  std::vector<int> multiplicities;  // algebraic multiplicities, summing to dim

  /// Moduli repeated by multiplicity, i.e. |lambda_1| >= |lambda_2| >= ...
  Vector<Scalar> flattened() const {
    int total = 0;
    for (int m : multiplicities) total += m;
    Vector<Scalar> out(total);
    Eigen::Index pos = 0;
    for (std::size_t i = 0; i < moduli.size(); ++i)
      for (int r = 0; r < multiplicities[i]; ++r) out(pos++) = moduli[i];
    return out;
  }
};

namespace detail {

// The shared closed form behind phi^s, V_s and rho_s: given a descending list
// x_1 >= ... >= x_d (singular values or eigenvalue moduli),
//   s <  d : x_1 ... x_floor(s) * x_{floor(s)+1}^{s - floor(s)}
//   s >= d : (x_1 ... x_d)^{s/d}
// Empty products are 1 and pow(x, 0) = 1 also for x = 0.
template <typename Scalar>
Scalar spectral_function(const Vector<Scalar>& x, Scalar s) {
  const auto d = x.size();
  if (s >= Scalar(d)) {
    Scalar prod = 1;
    for (Eigen::Index j = 0; j < d; ++j) prod *= x(j);
    return std::pow(prod, s / Scalar(d));
  }
  const auto k = static_cast<Eigen::Index>(std::floor(s));
  Scalar prod = 1;
  for (Eigen::Index j = 0; j < k; ++j) prod *= x(j);
  return prod * std::pow(x(k), s - Scalar(k));
}

// Logarithmic counterpart of spectral_function computed as a weighted sum of
// logs, so that -inf propagates and zero weights never produce 0 * -inf.
template <typename Scalar>
Scalar log_spectral_function(const Vector<Scalar>& x, Scalar s) {
  const auto d = x.size();
  Scalar sum = 0;
  auto add = [&sum](Scalar weight, Scalar value) {
    if (weight == Scalar(0)) return;
    sum += weight * std::log(value);
  };
  if (s >= Scalar(d)) {
    for (Eigen::Index j = 0; j < d; ++j) add(s / Scalar(d), x(j));
    return sum;
  }
  const auto k = static_cast<Eigen::Index>(std::floor(s));
  for (Eigen::Index j = 0; j < k; ++j) add(Scalar(1), x(j));
  add(s - Scalar(k), x(k));
  return sum;
}

template <typename Derived>
bool is_triangular(const Eigen::MatrixBase<Derived>& T) {
  bool upper = true, lower = true;
  for (Eigen::Index i = 0; i < T.rows(); ++i)
    for (Eigen::Index j = 0; j < T.cols(); ++j) {
      if (i > j && T(i, j) != 0) upper = false;
      if (i < j && T(i, j) != 0) lower = false;
    }
  return upper || lower;
}

}  // namespace detail

template <typename Derived>
SingularSpectrum<typename Derived::Scalar> singular_values(const Eigen::MatrixBase<Derived>& T) {
  using Scalar = typename Derived::Scalar;
  require_valid(T);
  Eigen::JacobiSVD<Operator<Scalar>> svd(T.eval());
  SingularSpectrum<Scalar> out{svd.singularValues()};
  if (!out.values.allFinite()) throw InvalidInput("singular value decomposition produced non-finite values");
  return out;
}

/// V_s(T). Integer k <= d gives sigma_1...sigma_k; fractional s interpolates
/// geometrically between V_floor(s) and V_floor(s)+1; s >= d gives |det T|^{s/d}.
template <typename Derived>
typename Derived::Scalar volume_growth(const Eigen::MatrixBase<Derived>& T, typename Derived::Scalar s) {
  require_positive_order(s);
  return detail::spectral_function(singular_values(T).values, s);
}

/// Same as volume_growth, from an already computed spectrum.
template <typename Scalar>
Scalar volume_growth(const SingularSpectrum<Scalar>& sigma, Scalar s) {
  require_positive_order(s);
  return detail::spectral_function(sigma.values, s);
}

/// Singular value function built from Gelfand numbers.
template <typename Derived>
typename Derived::Scalar phi_c(const Eigen::MatrixBase<Derived>& T, typename Derived::Scalar s) {
  return volume_growth(T, s);
}

/// Singular value function built from Kolmogorov numbers.
template <typename Derived>
typename Derived::Scalar phi_F(const Eigen::MatrixBase<Derived>& T, typename Derived::Scalar s) {
  return volume_growth(T, s);
}

/// Complex eigenvalues of T. Triangular inputs return their diagonal exactly,
/// which keeps nilpotent shift truncations at spectrum {0}.
template <typename Derived>
Vector<std::complex<typename Derived::Scalar>> eigenvalues(const Eigen::MatrixBase<Derived>& T) {
  using Scalar = typename Derived::Scalar;
  require_valid(T);
  if (detail::is_triangular(T)) return T.diagonal().template cast<std::complex<Scalar>>();
  Eigen::EigenSolver<Operator<Scalar>> solver(T.eval(), /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigenvalue iteration did not converge (dim " << T.rows() << ", max |entry| "
        << T.cwiseAbs().maxCoeff() << ")";
    throw NumericError(msg.str());
  }
  return solver.eigenvalues();
}

/// |lambda_1| >= ... >= |lambda_d| with algebraic multiplicity.
template <typename Derived>
Vector<typename Derived::Scalar> sorted_moduli(const Eigen::MatrixBase<Derived>& T) {
  using Scalar = typename Derived::Scalar;
  const auto lambda = eigenvalues(T);
  std::vector<Scalar> m(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) m[i] = std::abs(lambda(i));
  std::sort(m.begin(), m.end(), std::greater<>());
  return Eigen::Map<Vector<Scalar>>(m.data(), Eigen::Index(m.size()));
}

/// Eigenvalue moduli grouped within relative tolerance `grouping`.
template <typename Derived>
EigenModuli<typename Derived::Scalar> eigen_moduli(const Eigen::MatrixBase<Derived>& T,
                                                   typename Derived::Scalar grouping = 1e-9) {
  using Scalar = typename Derived::Scalar;
  const auto flat = sorted_moduli(T);
  EigenModuli<Scalar> out;
  for (Eigen::Index i = 0; i < flat.size(); ++i) {
    const Scalar m = flat(i);
    if (!out.moduli.empty()) {
      const Scalar lead = out.moduli.back();
      if (std::abs(lead - m) <= grouping * lead) {
        ++out.multiplicities.back();
        continue;
      }
    }
    out.moduli.push_back(m);
    out.multiplicities.push_back(1);
  }
  return out;
}

/// xi_j(T) = log |lambda_j|, counted with multiplicity; -inf for a zero modulus.
template <typename Derived>
typename Derived::Scalar xi(const Eigen::MatrixBase<Derived>& T, Eigen::Index j) {
  if (j < 1 || j > T.rows()) {
    std::ostringstream msg;
    msg << "index j must lie in [1, " << T.rows() << "], got " << j;
    throw DomainError(msg.str());
  }
  return std::log(sorted_moduli(T)(j - 1));
}

/// rho_s(T) = lim_n phi^s(T^n)^{1/n}, evaluated in closed form from the
/// eigenvalue moduli.
template <typename Derived>
typename Derived::Scalar rho_s(const Eigen::MatrixBase<Derived>& T, typename Derived::Scalar s) {
  require_positive_order(s);
  return detail::spectral_function(sorted_moduli(T), s);
}

/// r_s(T) = log rho_s(T) as a sum of xi_j; -inf iff rho_s(T) = 0.
template <typename Derived>
typename Derived::Scalar r_s(const Eigen::MatrixBase<Derived>& T, typename Derived::Scalar s) {
  require_positive_order(s);
  return detail::log_spectral_function(sorted_moduli(T), s);
}

/// det(T|_V) for V spanned by the columns of `basis`: the k-volume of T
/// applied to the unit ball of V relative to that ball, i.e.
/// sqrt(det Gram(T b)) / sqrt(det Gram(b)).
template <typename Derived, typename BasisDerived>
typename Derived::Scalar det_restricted(const Eigen::MatrixBase<Derived>& T,
                                        const Eigen::MatrixBase<BasisDerived>& basis) {
  using Scalar = typename Derived::Scalar;
  require_valid(T);
  const auto d = T.rows();
  const auto k = basis.cols();
  if (basis.rows() != d || k < 1 || k > d)
    throw DomainError("basis must be d x k with 1 <= k <= d");
  if (!basis.allFinite()) throw InvalidInput("basis has non-finite entries");
  Eigen::ColPivHouseholderQR<Operator<Scalar>> qr(basis.eval());
  qr.setThreshold(Scalar(1e-12));
  if (qr.rank() < k) throw DomainError("basis vectors are linearly dependent");
  const Operator<Scalar> q = qr.householderQ() * Operator<Scalar>::Identity(d, k);
  const Operator<Scalar> image = T * q;
  Eigen::JacobiSVD<Operator<Scalar>> svd(image);
  return svd.singularValues().prod();
}

/// k-element subsets of {0, ..., d-1} in lexicographic order.
inline std::vector<std::vector<Eigen::Index>> index_subsets(Eigen::Index d, Eigen::Index k) {
  std::vector<std::vector<Eigen::Index>> out;
  std::vector<Eigen::Index> current(k);
  for (Eigen::Index i = 0; i < k; ++i) current[i] = i;
  if (k > d) return out;
  while (true) {
    out.push_back(current);
    Eigen::Index i = k - 1;
    while (i >= 0 && current[i] == d - k + i) --i;
    if (i < 0) break;
    ++current[i];
    for (Eigen::Index j = i + 1; j < k; ++j) current[j] = current[j - 1] + 1;
  }
  return out;
}

/// k-th compound (exterior power) matrix: entry (I, J) is the minor of T on
/// rows I and columns J. Compounds are multiplicative and ||C_k(T)|| = V_k(T).
template <typename Derived>
Operator<typename Derived::Scalar> compound(const Eigen::MatrixBase<Derived>& T, Eigen::Index k) {
  using Scalar = typename Derived::Scalar;
  require_valid(T);
  if (k < 1 || k > T.rows()) throw DomainError("compound order must satisfy 1 <= k <= dim");
  const auto subsets = index_subsets(T.rows(), k);
  const auto n = static_cast<Eigen::Index>(subsets.size());
  Operator<Scalar> out(n, n);
  Operator<Scalar> minor(k, k);
  for (Eigen::Index I = 0; I < n; ++I)
    for (Eigen::Index J = 0; J < n; ++J) {
      for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b) minor(a, b) = T(subsets[I][a], subsets[J][b]);
      out(I, J) = minor.determinant();
    }
  return out;
}

template <typename Scalar>
struct SubspaceEstimate {
  Scalar kolmogorov;  // sampled lower estimate of F_k(T)
  Scalar gelfand;     // sampled upper estimate of c_k(T)
};

/// Monte-Carlo evaluation of F_k(T) = sup_{dim V = k} m(T|_V) and
/// c_k(T) = inf_{codim V = k-1} ||T|_V|| over uniformly random subspaces.
/// Every sample is feasible, so kolmogorov <= F_k and gelfand >= c_k.
template <typename Derived>
SubspaceEstimate<typename Derived::Scalar> subspace_oracle(const Eigen::MatrixBase<Derived>& T,
                                                           Eigen::Index k, int samples,
                                                           std::uint64_t seed) {
  using Scalar = typename Derived::Scalar;
  using Mat = Operator<Scalar>;
  require_valid(T);
  const auto d = T.rows();
  if (d > 4) throw DomainError("subspace_oracle is limited to dim <= 4");
  if (k < 1 || k > d) throw DomainError("k must satisfy 1 <= k <= dim");
  if (samples < 1) throw DomainError("samples must be positive");

  std::mt19937_64 rng(seed);
  std::normal_distribution<Scalar> normal;
  auto random_frame = [&](Eigen::Index cols) -> Mat {
    if (cols == d) return Mat::Identity(d, d);
    Mat g(d, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < d; ++i) g(i, j) = normal(rng);
    Eigen::HouseholderQR<Mat> qr(g);
    return qr.householderQ() * Mat::Identity(d, cols);
  };

  const Mat target = T;
  const auto codim_dim = d - k + 1;
  const int kol_draws = (k == d) ? 1 : samples;
  const int gel_draws = (codim_dim == d) ? 1 : samples;

  SubspaceEstimate<Scalar> est{Scalar(0), std::numeric_limits<Scalar>::infinity()};
  for (int i = 0; i < kol_draws; ++i) {
    Eigen::JacobiSVD<Mat> svd(Mat(target * random_frame(k)));
    est.kolmogorov = std::max(est.kolmogorov, svd.singularValues()(k - 1));
  }
  for (int i = 0; i < gel_draws; ++i) {
    Eigen::JacobiSVD<Mat> svd(Mat(target * random_frame(codim_dim)));
    est.gelfand = std::min(est.gelfand, svd.singularValues()(0));
  }
  return est;
}

}  // namespace cocycle
