#include "crossgreed/theory_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "crossgreed/errors.hpp"
#include "crossgreed/scalar.hpp"

namespace crossgreed::theory {

namespace {

bool is_probability(double x) { return x >= 0.0 && x <= 1.0 && std::isfinite(x); }

double interior_root(double a, double b) { return a > 0.0 && b > 0.0 ? std::sqrt(a * b) : 0.0; }

// ½|log(a/b)|, finite only for a, b > 0.
double half_log_ratio(double a, double b) { return 0.5 * std::fabs(std::log(a / b)); }

}  // namespace

BernoulliParams::BernoulliParams(double r_, double s_) : r(r_), s(s_) {
  if (!is_probability(r) || !is_probability(s)) {
    throw ContractError("Bernoulli parameters must lie in [0, 1]");
  }
}

double c_func(const BernoulliParams& params, double t) {
  if (!(t > 0.0)) throw ContractError("c(t) requires t > 0");
  const double r = params.r, rp = params.r_prime();
  return std::fabs(r * t - rp / t) + std::fabs(rp * t - r / t) - std::fabs(t - 1.0 / t);
}

double m_func(const BernoulliParams& params, double t) {
  const double base = c_func(params, std::exp(t));
  const double s = params.s, sp = params.s_prime();
  if (s == 0.0 || sp == 0.0) return base;
  const double shift = 0.5 * std::log(s / sp);
  return base - std::sqrt(s * sp) * (c_func(params, std::exp(t + shift)) + c_func(params, std::exp(t - shift)));
}

double m_tilde(const BernoulliParams& params, double x) {
  auto factor = [x](double a, double ap) {
    const double w = 2.0 * interior_root(a, ap);
    if (w == 0.0) return 1.0;
    return 1.0 - w * std::cos(0.5 * x * std::log(a / ap));
  };
  return 4.0 / (1.0 + x * x) * factor(params.s, params.s_prime()) * factor(params.r, params.r_prime());
}

double m_support_radius(const BernoulliParams& params) {
  if (params.r == 0.0 || params.r == 1.0) return std::numeric_limits<double>::infinity();
  double radius = half_log_ratio(params.r, params.r_prime());
  if (params.s > 0.0 && params.s < 1.0) radius += half_log_ratio(params.s, params.s_prime());
  return radius;
}

FourierCheck inverse_fourier_check(const BernoulliParams& params, std::span<const double> x_grid,
                                   double quad_tol) {
  if (!(params.r > 0.0 && params.r < 1.0)) {
    throw ContractError("inverse Fourier check needs r in (0, 1) for compact support");
  }
  if (!(quad_tol > 0.0)) throw ContractError("quadrature tolerance must be positive");
  // c is symmetric under r <-> r', so orient r >= r'.
  BernoulliParams p = params;
  if (p.r < p.r_prime()) p.r = p.r_prime();

  const double radius = m_support_radius(p);
  const double a = half_log_ratio(p.r, p.r_prime());
  const double b = (p.s > 0.0 && p.s < 1.0) ? half_log_ratio(p.s, p.s_prime()) : 0.0;
  std::vector<double> knots;
  for (double u : {-a, 0.0, a})
    for (double v : {-b, 0.0, b}) knots.push_back(std::clamp(u + v, -radius, radius));
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  // m is smooth between consecutive knots, so fixed 61-point Kronrod panels
  // (a few per oscillation of e^{-itx}) integrate it to roundoff.
  using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  std::vector<double> numeric(x_grid.size()), closed(x_grid.size());
  FourierCheck out;
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double x = x_grid[i];
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
      const double len = knots[k + 1] - knots[k];
      const auto panels = static_cast<std::size_t>(std::ceil(len * (1.0 + std::fabs(x))));
      for (std::size_t j = 0; j < panels; ++j) {
        const double step = len / static_cast<double>(panels);
        const double lo = knots[k] + step * static_cast<double>(j);
        const double hi = j + 1 == panels ? knots[k + 1] : lo + step;
        re += Quad::integrate([&](double t) { return m_func(p, t) * std::cos(t * x); }, lo, hi, 0);
        im -= Quad::integrate([&](double t) { return m_func(p, t) * std::sin(t * x); }, lo, hi, 0);
      }
    }
    if (!std::isfinite(re) || !std::isfinite(im)) throw std::runtime_error("quadrature produced a non-finite value");
    numeric[i] = re * inv_sqrt_2pi;
    closed[i] = m_tilde(p, x);
    out.max_imaginary = std::max(out.max_imaginary, std::fabs(im * inv_sqrt_2pi));
  }

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    num += numeric[i] * closed[i];
    den += closed[i] * closed[i];
  }
  out.fitted_constant = den > 0.0 ? num / den : 0.0;
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    out.max_deviation = std::max(out.max_deviation, std::fabs(numeric[i] - out.fitted_constant * closed[i]));
  }
  const bool degenerate = den == 0.0;
  out.passed = out.max_deviation <= quad_tol && out.max_imaginary <= quad_tol &&
               (degenerate || out.fitted_constant > 0.0);
  return out;
}

KernelSpec make_kernel_spec(const BernoulliParams& params, std::vector<double> scores) {
  if (scores.size() > kMaxKernelDimension) {
    throw CapacityError("kernel dimension " + std::to_string(scores.size()) + " exceeds " +
                        std::to_string(kMaxKernelDimension));
  }
  for (double l : scores) {
    if (!std::isfinite(l)) throw ContractError("kernel scores must be finite");
  }
  KernelSpec spec{params, std::move(scores), {}};
  const std::size_t n = spec.scores.size();
  spec.matrix.assign(n * n, 0.0);
  for (std::size_t z = 0; z < n; ++z) {
    for (std::size_t w = z; w < n; ++w) {
      const double v = m_func(params, spec.scores[z] - spec.scores[w]);
      spec.matrix[z * n + w] = v;
      spec.matrix[w * n + z] = v;
    }
  }
  return spec;
}

KernelCheck kernel_psd_check(const KernelSpec& spec, double tol) {
  const std::size_t n = spec.dimension();
  if (n > kMaxKernelDimension) throw CapacityError("kernel dimension exceeds " + std::to_string(kMaxKernelDimension));
  KernelCheck out;
  if (n == 0) {
    out.passed = true;
    return out;
  }
  Eigen::MatrixXd m(n, n);
  for (std::size_t z = 0; z < n; ++z)
    for (std::size_t w = 0; w < n; ++w) m(z, w) = spec.at(z, w);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = solver.eigenvalues().minCoeff();
  out.passed = out.min_eigenvalue >= -tol;
  return out;
}

namespace {

template <class Scalar>
Measure<Scalar> bernoulli(const Scalar& one_mass) {
  using T = ScalarTraits<Scalar>;
  return Measure<Scalar>::from_masses({T::one() - one_mass, one_mass});
}

template <class Scalar>
Scalar four_term_lhs(const Measure<Scalar>& r, const Measure<Scalar>& rp, const Measure<Scalar>& s,
                     const Measure<Scalar>& sp, const Measure<Scalar>& p, const Measure<Scalar>& q,
                     std::size_t cap) {
  if (!p.same_outcome_set(q)) throw DomainMismatchError("P and Q must share a sample space");
  using PM = ProductMeasure<Scalar>;
  const Scalar full = tv_distance(PM({r, s, p, q}), PM({rp, sp, q, p}), cap);
  const Scalar only_r = tv_distance(PM({r, p, q}), PM({rp, q, p}), cap);
  const Scalar only_s = tv_distance(PM({s, p, q}), PM({sp, q, p}), cap);
  const Scalar neither = tv_distance(PM({p, q}), PM({q, p}), cap);
  return full - only_r - only_s + neither;
}

}  // namespace

template <class Scalar>
Scalar bernoulli_lemma_lhs(const Scalar& r, const Scalar& s, const Measure<Scalar>& p, const Measure<Scalar>& q,
                           std::size_t cap) {
  using T = ScalarTraits<Scalar>;
  for (const Scalar* x : {&r, &s}) {
    if (*x < T::zero() || T::one() < *x) throw ContractError("Bernoulli parameters must lie in [0, 1]");
  }
  const auto big_r = bernoulli(r), big_s = bernoulli(s);
  const auto big_rp = bernoulli(Scalar(T::one() - r)), big_sp = bernoulli(Scalar(T::one() - s));
  return four_term_lhs(big_r, big_rp, big_s, big_sp, p, q, cap);
}

template <class Scalar>
Scalar general_lemma_lhs(const Measure<Scalar>& r, const Measure<Scalar>& r_prime, const Involution& f,
                         const Measure<Scalar>& s, const Measure<Scalar>& s_prime, const Involution& g,
                         const Measure<Scalar>& p, const Measure<Scalar>& q, std::size_t cap) {
  if (!check_involution_equivalent(r, r_prime, f)) throw ContractError("R and R' are not involution-equivalent");
  if (!check_involution_equivalent(s, s_prime, g)) throw ContractError("S and S' are not involution-equivalent");
  return four_term_lhs(r, r_prime.reordered(r.outcomes()), s, s_prime.reordered(s.outcomes()), p, q, cap);
}

template <class Scalar>
Scalar pairwise_e_sum(const Scalar& r, const Scalar& s, const Measure<Scalar>& p, const Measure<Scalar>& q,
                      PairFilter filter) {
  using T = ScalarTraits<Scalar>;
  if (!p.same_outcome_set(q)) throw DomainMismatchError("P and Q must share a sample space");
  const Scalar rp = T::one() - r, sp = T::one() - s;
  const Scalar half = T::half();
  const std::size_t n = p.size();
  std::vector<Scalar> qm(n);
  for (std::size_t i = 0; i < n; ++i) qm[i] = q.mass_of(p.outcome(i));
  Scalar total = T::zero();
  for (std::size_t z = 0; z < n; ++z) {
    for (std::size_t w = 0; w < n; ++w) {
      const bool zero_pair = T::is_zero(p.mass(z)) || T::is_zero(p.mass(w)) || T::is_zero(qm[z]) ||
                             T::is_zero(qm[w]);
      if (filter == PairFilter::ZeroMeasure && !zero_pair) continue;
      if (filter == PairFilter::PositiveOnly && zero_pair) continue;
      const Scalar pq = p.mass(z) * qm[w];
      const Scalar qp = qm[z] * p.mass(w);
      Scalar e = T::abs(Scalar(r * pq - rp * qp)) + T::abs(Scalar(s * pq - sp * qp));
      e -= T::abs(Scalar(r * s * pq - rp * sp * qp));
      e -= T::abs(Scalar(r * sp * pq - rp * s * qp));
      e -= half * T::abs(Scalar(pq - qp));
      total += e;
    }
  }
  return total;
}

template <class Scalar>
std::pair<double, double> general_sum_sides(const Measure<Scalar>& p, const Measure<Scalar>& p_prime,
                                            const BivariateFunction& phi) {
  std::vector<Outcome> support(p.outcomes().begin(), p.outcomes().end());
  support.insert(support.end(), p_prime.outcomes().begin(), p_prime.outcomes().end());
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  double lhs = 0.0, rhs = 0.0;
  for (Outcome x : support) {
    const double a = to_double(p.mass_of(x));
    const double b = to_double(p_prime.mass_of(x));
    lhs += phi(a, b);
    const double weight = a + b;
    if (weight == 0.0) continue;
    const double u = a / weight, up = b / weight;
    rhs += weight / 2.0 * (phi(u, up) + phi(up, u));
  }
  return {lhs, rhs};
}

#define CROSSGREED_INSTANTIATE_THEORY(S)                                                                        \
  template S bernoulli_lemma_lhs<S>(const S&, const S&, const Measure<S>&, const Measure<S>&, std::size_t);     \
  template S general_lemma_lhs<S>(const Measure<S>&, const Measure<S>&, const Involution&, const Measure<S>&,   \
                                  const Measure<S>&, const Involution&, const Measure<S>&, const Measure<S>&,   \
                                  std::size_t);                                                                 \
  template S pairwise_e_sum<S>(const S&, const S&, const Measure<S>&, const Measure<S>&, PairFilter);           \
  template std::pair<double, double> general_sum_sides<S>(const Measure<S>&, const Measure<S>&,                 \
                                                          const BivariateFunction&);

CROSSGREED_INSTANTIATE_THEORY(Rational)
CROSSGREED_INSTANTIATE_THEORY(double)

// ---------------------------------------------------------------------------
// Randomized suites

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Uniform on [0, 1) from the top 53 bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  // Open interval (0, 1), away from the boundary.
  double open_unit() { return uniform(0.01, 0.99); }

 private:
  std::mt19937_64 engine_;
};

Rational random_probability(Rng& rng) {
  const unsigned long den = 2 + rng.below(11);
  Rational q(static_cast<unsigned long>(rng.below(den + 1)), den);
  q.canonicalize();
  return q;
}

// Random measure with small integer weights; some outcomes get zero mass.
ExactMeasure random_measure(Rng& rng, std::size_t n, bool allow_zeros = true) {
  std::vector<unsigned long> w(n);
  unsigned long total = 0;
  while (total == 0) {
    total = 0;
    for (auto& x : w) {
      x = allow_zeros ? rng.below(6) : 1 + rng.below(5);
      total += x;
    }
  }
  std::vector<Rational> masses;
  for (auto x : w) {
    Rational q(x, total);
    q.canonicalize();
    masses.push_back(q);
  }
  return ExactMeasure::from_masses(std::move(masses));
}

FloatMeasure to_float(const ExactMeasure& m) {
  std::vector<double> masses;
  for (const auto& x : m.masses()) masses.push_back(x.get_d());
  std::vector<Outcome> outcomes(m.outcomes().begin(), m.outcomes().end());
  return FloatMeasure(std::move(outcomes), std::move(masses));
}

// Random pairing of 0..n-1.
Involution random_involution(Rng& rng, std::size_t n) {
  std::vector<Outcome> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  std::unordered_map<Outcome, Outcome> map;
  for (std::size_t i = 0; i < n; ++i) map[i] = i;
  const std::size_t pairs = rng.below(n / 2 + 1);
  for (std::size_t k = 0; k < pairs; ++k) {
    map[order[2 * k]] = order[2 * k + 1];
    map[order[2 * k + 1]] = order[2 * k];
  }
  return Involution(std::move(map));
}

template <class Scalar>
Measure<Scalar> pull_back(const Measure<Scalar>& m, const Involution& f) {
  std::vector<Scalar> masses;
  for (std::size_t i = 0; i < m.size(); ++i) masses.push_back(m.mass_of(f(m.outcome(i))));
  std::vector<Outcome> outcomes(m.outcomes().begin(), m.outcomes().end());
  return Measure<Scalar>(std::move(outcomes), std::move(masses));
}

template <class Scalar>
std::string render(const Measure<Scalar>& m) {
  std::string out = "[";
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) out += ", ";
    out += ScalarTraits<Scalar>::to_string(m.mass(i));
  }
  return out + "]";
}

std::string render(double x) { return ScalarTraits<double>::to_string(x); }

struct Tracker {
  SuiteResult result;
  bool maximize;  // worst = largest value, else smallest

  Tracker(std::string name, std::string kind, bool max_is_worst) : maximize(max_is_worst) {
    result.name = std::move(name);
    result.margin_kind = std::move(kind);
    result.worst_margin = max_is_worst ? -std::numeric_limits<double>::infinity()
                                       : std::numeric_limits<double>::infinity();
  }
  void observe(double margin) {
    ++result.instances;
    if (maximize ? margin > result.worst_margin : margin < result.worst_margin) result.worst_margin = margin;
  }
  void fail(const std::string& instance) {
    if (result.failures++ == 0) result.first_failure = instance;
  }
  SuiteResult finish() {
    if (result.instances == 0) result.worst_margin = 0.0;
    return std::move(result);
  }
};

SuiteResult bernoulli_suite(const TheoryConfig& cfg, Rng& rng) {
  Tracker t("bernoulli_lemma", "max_lhs", true);
  for (std::uint64_t i = 0; i < cfg.trials; ++i) {
    const Rational r = random_probability(rng), s = random_probability(rng);
    const std::size_t n = 1 + rng.below(4);
    const auto p = random_measure(rng, n), q = random_measure(rng, n);
    const Rational exact = bernoulli_lemma_lhs(r, s, p, q);
    const double approx = bernoulli_lemma_lhs(r.get_d(), s.get_d(), to_float(p), to_float(q));
    t.observe(approx);
    if (sgn(exact) > 0 || approx > cfg.tol) {
      t.fail("r=" + r.get_str() + " s=" + s.get_str() + " P=" + render(p) + " Q=" + render(q) +
             " lhs=" + exact.get_str());
    }
  }
  return t.finish();
}

SuiteResult general_suite(const TheoryConfig& cfg, Rng& rng) {
  Tracker t("general_lemma", "max_lhs", true);
  const std::uint64_t count = cfg.trials / 2;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t n1 = 1 + rng.below(4), n2 = 1 + rng.below(4), n = 1 + rng.below(3);
    const auto f = random_involution(rng, n1), g = random_involution(rng, n2);
    const auto r = random_measure(rng, n1), s = random_measure(rng, n2);
    const auto rp = pull_back(r, f), sp = pull_back(s, g);
    const auto p = random_measure(rng, n), q = random_measure(rng, n);
    const Rational exact = general_lemma_lhs(r, rp, f, s, sp, g, p, q);
    const double approx = general_lemma_lhs(to_float(r), to_float(rp), f, to_float(s), to_float(sp), g,
                                            to_float(p), to_float(q));
    t.observe(approx);
    if (sgn(exact) > 0 || approx > cfg.tol) {
      t.fail("R=" + render(r) + " R'=" + render(rp) + " S=" + render(s) + " S'=" + render(sp) +
             " P=" + render(p) + " Q=" + render(q) + " lhs=" + exact.get_str());
    }
  }
  return t.finish();
}

SuiteResult zero_measure_suite(const TheoryConfig& cfg, Rng& rng) {
  Tracker t("zero_measure_cancellation", "max_abs_zero_pair_sum", true);
  const std::uint64_t count = std::max<std::uint64_t>(cfg.trials / 10, 1);
  for (std::uint64_t i = 0; i < count; ++i) {
    const Rational r = random_probability(rng), s = random_probability(rng);
    const std::size_t n = 2 + rng.below(4);
    auto p = random_measure(rng, n), q = random_measure(rng, n);
    // Force a zero-mass outcome into P.
    std::vector<Rational> pm(p.masses().begin(), p.masses().end());
    const std::size_t hole = rng.below(n);
    if (sgn(pm[hole]) != 0) {
      const Rational moved = pm[hole];
      pm[hole] = 0;
      pm[(hole + 1) % n] += moved;
      p = ExactMeasure::from_masses(std::move(pm));
    }
    const Rational zero_part = pairwise_e_sum(r, s, p, q, PairFilter::ZeroMeasure);
    const Rational all = pairwise_e_sum(r, s, p, q, PairFilter::All);
    const Rational lhs = bernoulli_lemma_lhs(r, s, p, q);
    t.observe(std::fabs(zero_part.get_d()));
    if (sgn(zero_part) != 0 || all != -lhs) {
      t.fail("r=" + r.get_str() + " s=" + s.get_str() + " P=" + render(p) + " Q=" + render(q) +
             " zero_pair_sum=" + zero_part.get_str());
    }
  }
  return t.finish();
}

SuiteResult general_sum_suite(const TheoryConfig& cfg, Rng& rng) {
  Tracker t("general_sum_identity", "max_abs_difference", true);
  const std::uint64_t count = std::max<std::uint64_t>(cfg.trials / 10, 1);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t n = 1 + rng.below(6);
    const auto f = random_involution(rng, n);
    const auto p = random_measure(rng, n);
    const auto pp = pull_back(p, f);
    double c[7];
    for (double& x : c) x = rng.uniform(-1.0, 1.0);
    const double d = rng.uniform(0.0, 3.0), h = rng.uniform(0.0, 3.0);
    const BivariateFunction phi = [=](double u, double v) {
      return c[0] * u + c[1] * v + c[2] * std::fabs(u - d * v) + c[3] * std::sqrt(u * v) +
             c[4] * std::max(u, h * v) + c[5] * std::min(u, v) + c[6] * std::hypot(u, v);
    };
    const auto [lhs, rhs] = general_sum_sides(p, pp, phi);
    const double diff = std::fabs(lhs - rhs);
    t.observe(diff);
    if (diff > cfg.tol) t.fail("P=" + render(p) + " P'=" + render(pp) + " difference=" + render(diff));
  }
  return t.finish();
}

SuiteResult symmetry_suite(const TheoryConfig& cfg, Rng& rng) {
  Tracker t("c_m_symmetry", "max_abs_asymmetry", true);
  const std::uint64_t count = std::max<std::uint64_t>(cfg.trials / 10, 1);
  for (std::uint64_t i = 0; i < count; ++i) {
    const BernoulliParams params(rng.open_unit(), rng.open_unit());
    const double tt = std::exp(rng.uniform(-4.0, 4.0));
    const double x = rng.uniform(-4.0, 4.0);
    const double c_gap = std::fabs(c_func(params, tt) - c_func(params, 1.0 / tt));
    const double m_gap = std::fabs(m_func(params, x) - m_func(params, -x));
    const double scale = 1.0 + std::max(tt, 1.0 / tt);
    const double gap = std::max(c_gap / scale, m_gap);
    t.observe(gap);
    if (gap > cfg.tol) {
      t.fail("r=" + render(params.r) + " s=" + render(params.s) + " t=" + render(tt) + " x=" + render(x));
    }
  }
  return t.finish();
}

SuiteResult mtilde_suite(const TheoryConfig& cfg, Rng& rng) {
  Tracker t("m_tilde_nonnegative", "min_value", false);
  for (std::uint64_t i = 0; i < cfg.trials; ++i) {
    const BernoulliParams params(rng.open_unit(), rng.open_unit());
    double lowest = std::numeric_limits<double>::infinity();
    double at = 0.0;
    for (int k = 0; k <= 100; ++k) {
      const double x = -50.0 + k;
      double v = m_tilde(params, x);
      if (cfg.corrupt_mtilde_sign) v = -v;
      if (v < lowest) {
        lowest = v;
        at = x;
      }
    }
    t.observe(lowest);
    if (lowest < -cfg.tol) {
      t.fail("r=" + render(params.r) + " s=" + render(params.s) + " x=" + render(at) + " m_tilde=" + render(lowest));
    }
  }
  return t.finish();
}

SuiteResult kernel_suite(const TheoryConfig& cfg, Rng& rng) {
  Tracker t("kernel_psd", "min_eigenvalue", false);
  for (std::uint64_t i = 0; i < cfg.trials; ++i) {
    const BernoulliParams params(rng.open_unit(), rng.open_unit());
    const std::size_t n = 1 + rng.below(50);
    std::vector<double> scores(n);
    for (auto& l : scores) l = rng.uniform(-3.0, 3.0);
    if (n > 2 && rng.below(4) == 0) scores[n - 1] = scores[0];
    const auto check = kernel_psd_check(make_kernel_spec(params, scores), cfg.eigen_tol);
    t.observe(check.min_eigenvalue);
    if (!check.passed) {
      t.fail("r=" + render(params.r) + " s=" + render(params.s) + " dimension=" + std::to_string(n) +
             " min_eigenvalue=" + render(check.min_eigenvalue));
    }
  }
  return t.finish();
}

SuiteResult fourier_suite(const TheoryConfig& cfg, Rng& rng) {
  Tracker t("inverse_fourier", "max_deviation", true);
  const std::uint64_t count = (cfg.trials + 49) / 50;
  std::vector<double> grid;
  for (int k = 0; k <= 100; ++k) grid.push_back(-10.0 + 0.2 * k);
  for (std::uint64_t i = 0; i < count; ++i) {
    double r = rng.uniform(0.05, 0.45);
    if (rng.below(2)) r = 1.0 - r;
    const BernoulliParams params(r, rng.uniform(0.1, 0.9));
    const auto check = inverse_fourier_check(params, grid, cfg.quad_tol);
    t.observe(std::max(check.max_deviation, check.max_imaginary));
    if (!check.passed) {
      t.fail("r=" + render(params.r) + " s=" + render(params.s) + " deviation=" + render(check.max_deviation) +
             " constant=" + render(check.fitted_constant));
    }
  }
  return t.finish();
}

using Suite = SuiteResult (*)(const TheoryConfig&, Rng&);

std::size_t thread_budget() {
  if (const char* env = std::getenv("CROSSGREED_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

std::vector<SuiteResult> run_theory_suites(const TheoryConfig& config) {
  if (config.trials == 0) return {};
  static constexpr Suite kSuites[] = {bernoulli_suite, general_suite,  zero_measure_suite, general_sum_suite,
                                      symmetry_suite,  mtilde_suite,   kernel_suite,       fourier_suite};
  constexpr std::size_t n = std::size(kSuites);
  std::vector<SuiteResult> results(n);
  std::vector<std::exception_ptr> errors(n);
  // Each suite owns a generator seeded from (seed, index), so results do not
  // depend on scheduling.
  auto run = [&](std::size_t i) {
    try {
      std::seed_seq seq{config.seed, static_cast<std::uint64_t>(i)};
      std::uint64_t seed_words[2];
      seq.generate(std::begin(seed_words), std::end(seed_words));
      Rng rng((seed_words[0] << 32) ^ seed_words[1]);
      results[i] = kSuites[i](config, rng);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t workers = std::min(thread_budget(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) run(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace crossgreed::theory
