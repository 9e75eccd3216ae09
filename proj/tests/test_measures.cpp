#include <doctest.h>

#include <cmath>

#include "crossgreed/measures.hpp"
#include "support/oracles.hpp"

using namespace crossgreed;
using oracle::Q;

TEST_CASE("measure validation") {
  CHECK_THROWS_AS(ExactMeasure::from_masses({Q(1, 2), Q(1, 3)}), ContractError);
  CHECK_THROWS_AS(ExactMeasure::from_masses({Q(3, 2), Q(-1, 2)}), ContractError);
  CHECK_THROWS_AS(ExactMeasure({0, 0}, {Q(1, 2), Q(1, 2)}), ContractError);
  CHECK_NOTHROW(FloatMeasure::from_masses({0.1, 0.2, 0.7}));
  CHECK_THROWS_AS(FloatMeasure::from_masses({0.1, 0.2, 0.71}), ContractError);

  const auto m = ExactMeasure({7, 3}, {Q(1, 4), Q(3, 4)});
  CHECK(m.mass_of(3) == Q(3, 4));
  CHECK(m.mass_of(5) == 0);
  CHECK(*m.index_of(7) == 0);
  CHECK_FALSE(m.index_of(9).has_value());
  const auto r = m.reordered(std::vector<Outcome>{3, 7});
  CHECK(r.outcome(0) == 3);
  CHECK(r.mass(0) == Q(3, 4));
  CHECK(r.same_outcome_set(m));
}

TEST_CASE("tv distance examples") {
  const auto u = ExactMeasure::uniform(2);
  CHECK(tv_distance(u, u) == 0);
  CHECK(tv_distance(ExactMeasure({0, 1}, {1, 0}), ExactMeasure({0, 1}, {0, 1})) == 1);
  const oracle::Masses p{Q(7, 10), Q(3, 10)}, q{Q(1, 5), Q(4, 5)};
  CHECK(oracle::tv(p, q) == Q(1, 2));
  CHECK(tv_distance(oracle::to_measure(p), oracle::to_measure(q)) == Q(1, 2));
  CHECK(tv_distance(FloatMeasure::from_masses({0.7, 0.3}), FloatMeasure::from_masses({0.2, 0.8})) ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(tv_distance(ExactMeasure::uniform(2), ExactMeasure::uniform(3)), DomainMismatchError);
}

TEST_CASE("commutator examples") {
  const oracle::Masses p{Q(7, 10), Q(3, 10)}, q{Q(1, 5), Q(4, 5)};
  CHECK(oracle::commutator(p, q) == Q(1, 2));
  CHECK(commutator_tv(oracle::to_measure(p), oracle::to_measure(q)) == Q(1, 2));
  CHECK(commutator_tv(oracle::to_measure(p), oracle::to_measure(p)) == 0);
  CHECK(commutator_tv(ExactMeasure::from_masses({1, 0}), ExactMeasure::from_masses({0, 1})) == 1);
  CHECK_THROWS_AS(commutator_tv(ExactMeasure::uniform(10), ExactMeasure::uniform(10), 4), CapacityError);
}

TEST_CASE("commutator equals tv of the swapped product and is symmetric") {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(16);
    const auto p = rng.measure(n), q = rng.measure(n);
    const auto mp = oracle::to_measure(p), mq = oracle::to_measure(q);
    const Rational c = commutator_tv(mp, mq);
    CHECK(c == oracle::commutator(p, q));
    CHECK(c == commutator_tv(mq, mp));
    CHECK(c == tv_distance(ProductMeasure<Rational>({mp, mq}), ProductMeasure<Rational>({mq, mp})));
    CHECK(c == tv_distance(ProductMeasure<Rational>({mp, mq}).materialize(),
                           ProductMeasure<Rational>({mq, mp}).materialize()));
    const Rational d = tv_distance(mp, mq);
    CHECK(d >= 0);
    CHECK(d <= 1);
    CHECK(d == tv_distance(mq, mp));
    CHECK((d == 0) == (p == q));
  }
}

TEST_CASE("product measure enumeration") {
  const oracle::Masses a{Q(1, 3), Q(2, 3)}, b{Q(1, 2), Q(1, 4), Q(1, 4)};
  const ProductMeasure<Rational> pm({oracle::to_measure(a), oracle::to_measure(b)});
  CHECK(pm.size() == 6);
  const auto expected = oracle::product({a, b});
  const auto dense = pm.materialize();
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(dense.mass_of(i) == expected[i]);
  std::size_t visited = 0;
  pm.for_each([&](std::span<const std::size_t> pos, const Rational& mass) {
    CHECK(mass == a[pos[0]] * b[pos[1]]);
    ++visited;
  });
  CHECK(visited == 6);
  CHECK_THROWS_AS(pm.materialize(5), CapacityError);
}

TEST_CASE("involutions") {
  CHECK_THROWS_AS(Involution({{0, 1}, {1, 2}, {2, 0}}), ContractError);
  const auto t = Involution::transpose(3);
  CHECK(t(1 * 3 + 2) == 2 * 3 + 1);
  CHECK(t(4) == 4);
  const auto s = Involution::swap(0, 1);
  CHECK(s(0) == 1);
  CHECK(s(5) == 5);

  const auto p = ExactMeasure::from_masses({Q(7, 10), Q(3, 10)});
  CHECK(check_involution_equivalent(p, p, Involution::identity(p.outcomes())));
  CHECK_FALSE(check_involution_equivalent(p, p, s));

  const auto q = ExactMeasure::from_masses({Q(1, 5), Q(4, 5)});
  const auto pq = ProductMeasure<Rational>({p, q}).materialize();
  const auto qp = ProductMeasure<Rational>({q, p}).materialize();
  CHECK(check_involution_equivalent(pq, qp, Involution::transpose(2)));

  const auto both = Involution::product(Involution::swap(0, 1), Involution::identity(std::vector<Outcome>{0, 1, 2}), 3);
  CHECK(both(0 * 3 + 2) == 1 * 3 + 2);
}

TEST_CASE("swap sums") {
  const auto p = ExactMeasure::from_masses({Q(7, 10), Q(3, 10)});
  const auto q = ExactMeasure::from_masses({Q(1, 5), Q(4, 5)});
  const auto pq = ProductMeasure<Rational>({p, q}).materialize();
  const auto qp = ProductMeasure<Rational>({q, p}).materialize();
  const auto t = Involution::transpose(2);
  CHECK(swap_sum_check(pq, qp, t, [](double a, double b) { return a * b; }));
  CHECK(swap_sum_check(pq, qp, t, [](double a, double b) { return std::fabs(a - 2 * b); }));

  const auto x = ExactMeasure::from_masses({Q(7, 10), Q(3, 10)});
  const auto y = ExactMeasure::from_masses({Q(3, 5), Q(2, 5)});
  // 0.49 + 0.09 against 0.36 + 0.16
  CHECK_FALSE(swap_sum_check(x, y, Involution::identity(x.outcomes()), [](double a, double) { return a * a; }));

  oracle::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.below(5);
    const auto a = oracle::to_measure(rng.measure(n)), b = oracle::to_measure(rng.measure(n));
    const auto ab = ProductMeasure<Rational>({a, b}).materialize();
    const auto ba = ProductMeasure<Rational>({b, a}).materialize();
    const double c1 = rng.unit() * 2 - 1, c2 = rng.unit() * 3, c3 = rng.unit();
    const BivariateFunction phi = [=](double u, double v) {
      return c1 * std::fabs(u - c2 * v) + c3 * std::sqrt(u * v) + std::max(u, c2 * v);
    };
    CHECK(swap_sum_check(ab, ba, Involution::transpose(n), phi));
  }
}
