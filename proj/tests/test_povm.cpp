#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kdq/errors.hpp"
#include "kdq/povm.hpp"
#include "kdq/rng.hpp"

using namespace kdq;

namespace {

CMatrix completeness_sum(const MeasurementSet& set) {
  CMatrix s = CMatrix::Zero(set.dim, set.dim);
  for (const CVector& ket : set.kets) s += outer(ket, ket);
  return s;
}

}  // namespace

TEST_CASE("builtin qubit sets satisfy completeness") {
  struct Expect {
    const char* name;
    std::size_t kets;
    double alpha;
  };
  for (Expect e : {Expect{"z", 2, 1.0}, Expect{"zy", 4, 2.0},
                   Expect{"zyx", 6, 3.0}}) {
    MeasurementSet set = builtin_set(e.name);
    CHECK(set.dim == 2);
    CHECK(set.size() == e.kets);
    CHECK(set.alpha == doctest::Approx(e.alpha));
    CHECK(max_abs_diff(completeness_sum(set), set.alpha * identity(2)) <
          1e-12);
    for (const CVector& ket : set.kets) {
      CHECK(std::abs(ket.norm() - 1.0) < 1e-12);
    }
  }
  CHECK_THROWS_AS(builtin_set("nope"), ConfigError);
}

TEST_CASE("mutually unbiased bases in dimensions 3 and 4") {
  for (auto [name, dim, alpha] :
       {std::tuple{"mub-d3", Eigen::Index{3}, 4.0},
        std::tuple{"mub-d4", Eigen::Index{4}, 5.0}}) {
    MeasurementSet set = builtin_set(name);
    CHECK(set.dim == dim);
    CHECK(set.size() == static_cast<std::size_t>((dim + 1) * dim));
    CHECK(set.alpha == doctest::Approx(alpha));
    CHECK(max_abs_diff(completeness_sum(set), alpha * identity(dim)) < 1e-12);

    // Within a basis: orthonormal. Across bases: |<a|b>|^2 = 1/d.
    const double cross = 1.0 / static_cast<double>(dim);
    for (std::size_t a = 0; a < set.size(); ++a) {
      for (std::size_t b = a + 1; b < set.size(); ++b) {
        double ov = std::norm(cplx(set.kets[a].dot(set.kets[b])));
        bool same_basis = a / static_cast<std::size_t>(dim) ==
                          b / static_cast<std::size_t>(dim);
        if (same_basis) {
          CHECK(ov < 1e-12);
        } else {
          CHECK(ov == doctest::Approx(cross).epsilon(1e-9));
        }
      }
    }
  }
}

TEST_CASE("computational set and custom sets") {
  MeasurementSet comp = computational_set(3);
  CHECK(comp.alpha == doctest::Approx(1.0));
  CHECK(comp.size() == 3);

  // A valid custom family re-derives alpha.
  MeasurementSet zy = builtin_set("zy");
  MeasurementSet rebuilt = make_set(2, zy.kets, "again");
  CHECK(rebuilt.alpha == doctest::Approx(2.0));

  // An incomplete family is rejected.
  std::vector<CVector> bad = {zy.kets[0], zy.kets[2]};
  CHECK_THROWS_AS(make_set(2, bad), std::invalid_argument);
}

TEST_CASE("povm elements are diagonal and complete") {
  for (const char* name : {"zy", "zyx", "mub-d3"}) {
    MeasurementSet set = builtin_set(name);
    MeasurementOperators povm = build_povm(set);
    REQUIRE(povm.elements.size() == set.size());
    CMatrix sum = CMatrix::Zero(set.dim, set.dim);
    for (const CMatrix& m : povm.elements) {
      for (Eigen::Index r = 0; r < set.dim; ++r) {
        for (Eigen::Index c = 0; c < set.dim; ++c) {
          if (r != c) CHECK(std::abs(m(r, c)) == 0.0);
        }
      }
      sum += adjoint(m) * m;
    }
    CHECK(max_abs_diff(sum, identity(set.dim)) < 1e-12);
  }
}

TEST_CASE("informational completeness") {
  CHECK(!is_informationally_complete(builtin_set("z")));
  CHECK(!is_informationally_complete(builtin_set("zy")));
  CHECK(is_informationally_complete(builtin_set("zyx")));
  CHECK(is_informationally_complete(builtin_set("mub-d3")));
  CHECK(is_informationally_complete(builtin_set("mub-d4")));

  // Invariant under rescaling and permutation of the kets (the aggregate
  // is built directly, so completeness of the set is irrelevant here).
  MeasurementSet set = builtin_set("zyx");
  std::vector<CVector> scrambled = set.kets;
  std::rotate(scrambled.begin(), scrambled.begin() + 2, scrambled.end());
  SplitMix64 rng(5);
  for (CVector& ket : scrambled) {
    ket *= cplx(0.5 + rng.uniform(), rng.uniform());
  }
  MeasurementSet hacked;
  hacked.dim = 2;
  hacked.alpha = 3.0;
  hacked.kets = scrambled;
  hacked.name = "scrambled";
  CHECK(is_informationally_complete(hacked));
}

TEST_CASE("sampling decomposition partitions into bases") {
  auto groups_zy = sampling_decomposition(builtin_set("zy"));
  REQUIRE(groups_zy.size() == 2);
  CHECK(groups_zy[0] == std::vector<std::size_t>{0, 1});
  CHECK(groups_zy[1] == std::vector<std::size_t>{2, 3});

  CHECK(sampling_decomposition(builtin_set("zyx")).size() == 3);
  CHECK(sampling_decomposition(builtin_set("mub-d3")).size() == 4);
  CHECK(sampling_decomposition(builtin_set("mub-d4")).size() == 5);

  // Trine: three unit kets at 120 degrees; complete with alpha = 3/2 but
  // admitting no orthonormal-basis partition.
  std::vector<CVector> trine;
  for (int k = 0; k < 3; ++k) {
    double a = 2.0 * std::numbers::pi * k / 3.0;
    CVector ket(2);
    ket << std::cos(a / 2.0), std::sin(a / 2.0);
    trine.push_back(ket);
  }
  MeasurementSet trine_set = make_set(2, trine, "trine");
  CHECK(trine_set.alpha == doctest::Approx(1.5));
  CHECK_THROWS_AS(sampling_decomposition(trine_set), NumericError);
}
