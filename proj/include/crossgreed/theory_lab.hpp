#pragma once

// Numeric checks of the structural facts behind submodularity of the
// commutator total variation: the Bernoulli-case inequality, its reduction of
// the general case, and the positive-definite kernel argument (closed-form
// inverse Fourier transform, kernel eigenvalues).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crossgreed/measures.hpp"

namespace crossgreed::theory {

// Bernoulli pair R (R(1) = r) and S (S(1) = s); R' and S' are their flips.
struct BernoulliParams {
  double r = 0.5;
  double s = 0.5;

  BernoulliParams() = default;
  BernoulliParams(double r_, double s_);  // throws ContractError outside [0, 1]
  double r_prime() const { return 1.0 - r; }
  double s_prime() const { return 1.0 - s; }
};

// c(t) = |r t − r'/t| + |r' t − r/t| − |t − 1/t| for t > 0.
double c_func(const BernoulliParams& params, double t);

// m(t) = c(e^t) − √(ss')·[c(√(s/s')·e^t) + c(√(s'/s)·e^t)]; equals c(e^t) when
// s ∈ {0, 1}.
double m_func(const BernoulliParams& params, double t);

// Closed-form inverse Fourier transform of m, up to a positive constant:
// 4/(1+x²)·(1 − 2√(ss')cos(½x log(s/s')))·(1 − 2√(rr')cos(½x log(r/r'))).
double m_tilde(const BernoulliParams& params, double x);

// Half-width of the support of m: c(e^t) vanishes for |t| ≥ ½|log(r/r')| and
// the shifted terms add ½|log(s/s')|.
double m_support_radius(const BernoulliParams& params);

struct FourierCheck {
  double max_deviation = 0.0;    // max |numeric − fitted_constant·m̃| over the grid
  double max_imaginary = 0.0;    // max |Im| of the numeric transform
  double fitted_constant = 0.0;  // least-squares γ in numeric ≈ γ·m̃
  bool passed = false;
};

// Numeric (1/√(2π))∫ m(t) e^{−itx} dt by fixed-panel Gauss–Kronrod over
// the compact support, compared to m̃ after fitting a positive constant. Passes
// iff both deviations are ≤ quad_tol and the constant is positive (or m ≡ 0).
FourierCheck inverse_fourier_check(const BernoulliParams& params, std::span<const double> x_grid,
                                   double quad_tol);

struct KernelSpec {
  BernoulliParams params;
  std::vector<double> scores;
  std::vector<double> matrix;  // row-major, M(z, w) = m(l(z) − l(w))

  std::size_t dimension() const { return scores.size(); }
  double at(std::size_t z, std::size_t w) const { return matrix[z * scores.size() + w]; }
};

inline constexpr std::size_t kMaxKernelDimension = 512;

KernelSpec make_kernel_spec(const BernoulliParams& params, std::vector<double> scores);

struct KernelCheck {
  double min_eigenvalue = 0.0;
  bool passed = false;  // min_eigenvalue ≥ −tol
};

KernelCheck kernel_psd_check(const KernelSpec& spec, double tol);

inline constexpr std::size_t kLemmaEnumerationCap = std::size_t{1} << 22;

// Left-hand side d_TV(R×S×P×Q, R'×S'×Q×P) − d_TV(R×P×Q, R'×Q×P)
// − d_TV(S×P×Q, S'×Q×P) + d_TV(P×Q, Q×P) for Bernoulli R, S with R(1) = r,
// S(1) = s, by explicit enumeration. Nonpositive in theory.
template <class Scalar>
Scalar bernoulli_lemma_lhs(const Scalar& r, const Scalar& s, const Measure<Scalar>& p, const Measure<Scalar>& q,
                           std::size_t cap = kLemmaEnumerationCap);

// Same four-term left-hand side for general R ~f R' and S ~g S'. Throws
// ContractError when either equivalence fails.
template <class Scalar>
Scalar general_lemma_lhs(const Measure<Scalar>& r, const Measure<Scalar>& r_prime, const Involution& f,
                         const Measure<Scalar>& s, const Measure<Scalar>& s_prime, const Involution& g,
                         const Measure<Scalar>& p, const Measure<Scalar>& q,
                         std::size_t cap = kLemmaEnumerationCap);

enum class PairFilter { All, ZeroMeasure, PositiveOnly };

// Σ E(z, w) over pairs selected by `filter`, with
// E = |rPQ − r'QP| + |sPQ − s'QP| − |rsPQ − r's'QP| − |rs'PQ − r'sQP| − ½|PQ − QP|,
// PQ = P(z)Q(w), QP = Q(z)P(w). The sum over all pairs is −LHS; the sum over
// pairs with P(z)P(w)Q(z)Q(w) = 0 vanishes.
template <class Scalar>
Scalar pairwise_e_sum(const Scalar& r, const Scalar& s, const Measure<Scalar>& p, const Measure<Scalar>& q,
                      PairFilter filter);

// Both sides of Σ φ(P(x), P'(x)) = Σ (P(x)+P'(x))/2 · (φ(U_x(1), U'_x(1)) +
// φ(U'_x(1), U_x(1))); outcomes with P(x) + P'(x) = 0 contribute nothing.
template <class Scalar>
std::pair<double, double> general_sum_sides(const Measure<Scalar>& p, const Measure<Scalar>& p_prime,
                                            const BivariateFunction& phi);

// Randomized verification suites, as run by `crossgreed verify-theory`.
struct SuiteResult {
  std::string name;
  std::uint64_t instances = 0;
  std::uint64_t failures = 0;
  // Most adverse value seen; its meaning is suite-specific (see `margin_kind`).
  double worst_margin = 0.0;
  std::string margin_kind;
  std::string first_failure;  // serialized failing instance, empty if none
};

struct TheoryConfig {
  std::uint64_t seed = 0;
  std::uint64_t trials = 200;
  double tol = 1e-10;
  double eigen_tol = 1e-8;
  double quad_tol = 1e-6;
  // Test hook: flips the sign of m̃ inside the nonnegativity suite.
  bool corrupt_mtilde_sign = false;
};

std::vector<SuiteResult> run_theory_suites(const TheoryConfig& config);

}  // namespace crossgreed::theory
