#include <array>
#include <cmath>
#include <set>

#include "doctest.h"

#include "cutstock/errors.hpp"
#include "cutstock/rng.hpp"

using namespace cutstock;

TEST_CASE("streams are reproducible from the seed") {
  RngStream a(7), b(7);
  for (int k = 0; k < 100; ++k) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derived streams are independent of the parent's position") {
  RngStream a(11);
  RngStream child_before = a.derive(3);
  for (int k = 0; k < 10; ++k) a.next_u64();
  RngStream child_after = a.derive(3);
  CHECK(child_before.next_u64() == child_after.next_u64());
  CHECK(a.derive(3).next_u64() != a.derive(4).next_u64());
  CHECK(a.derive(1, 2).next_u64() == a.derive(1).derive(2).next_u64());
}

TEST_CASE("uniform_int covers the closed range without bias") {
  RngStream rng(5);
  std::array<int, 6> hist{};
  const int draws = 60000;
  for (int k = 0; k < draws; ++k) {
    auto v = rng.uniform_int(0, 5);
    REQUIRE(v >= 0);
    REQUIRE(v <= 5);
    ++hist[v];
  }
  for (int c : hist) CHECK(std::abs(c - draws / 6) < 500);
  CHECK(RngStream(1).uniform_int(4, 4) == 4);
}

TEST_CASE("uniform01 stays in [0, 1)") {
  RngStream rng(9);
  double sum = 0.0;
  for (int k = 0; k < 10000; ++k) {
    double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 10000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("normal has unit variance") {
  RngStream rng(13);
  double sum = 0.0, sq = 0.0;
  const int n = 40000;
  for (int k = 0; k < n; ++k) {
    double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::abs(sq / n - 1.0) < 0.03);
}

TEST_CASE("categorical respects zero weights and proportions") {
  std::array<double, 4> p{0.5, 0.0, 0.25, 0.25};
  Categorical cat(p);
  RngStream rng(21);
  std::array<int, 4> hist{};
  for (int k = 0; k < 40000; ++k) ++hist[cat.sample(rng)];
  CHECK(hist[1] == 0);
  CHECK(std::abs(hist[0] - 20000) < 600);
  CHECK(std::abs(hist[2] - 10000) < 500);

  std::array<double, 2> unnormalized{2.0, 6.0};
  Categorical scaled(unnormalized);
  int ones = 0;
  for (int k = 0; k < 8000; ++k) ones += scaled.sample(rng);
  CHECK(std::abs(ones - 6000) < 250);
}

TEST_CASE("categorical rejects invalid weights") {
  std::array<double, 2> zero{0.0, 0.0};
  CHECK_THROWS_AS(Categorical{zero}, ContractViolation);
  std::array<double, 2> negative{1.0, -0.5};
  CHECK_THROWS_AS(Categorical{negative}, ContractViolation);
}
