#include <doctest.h>

#include <cmath>
#include <set>

#include "fleam/core/csv.hpp"
#include "fleam/core/errors.hpp"
#include "fleam/core/rng.hpp"

using namespace fleam;

TEST_CASE("rng: determinism and range") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(43);
  CHECK(a.next_u64() != c.next_u64());

  Rng r(7);
  for (int i = 0; i < 1000; ++i) {
    const double d = r.next_double();
    CHECK(d >= 0.0);
    CHECK(d < 1.0);
    CHECK(r.next_below(10) < 10);
  }
}

TEST_CASE("rng: shuffle is a permutation and seed-stable") {
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  Rng r(3);
  r.shuffle(v);
  std::set<int> s(v.begin(), v.end());
  CHECK(s.size() == 10);
  std::vector<int> w{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  Rng r2(3);
  r2.shuffle(w);
  CHECK(v == w);
}

TEST_CASE("rng: normal and gamma moments are sane") {
  Rng r(11);
  double sum = 0, sum2 = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::abs(sum2 / n - 1.0) < 0.05);

  double gsum = 0;
  for (int i = 0; i < n; ++i) gsum += r.gamma(2.5);
  CHECK(std::abs(gsum / n - 2.5) < 0.06);

  auto d = r.dirichlet({0.5, 0.5, 0.5});
  double dsum = 0;
  for (double x : d) {
    CHECK(x >= 0);
    dsum += x;
  }
  CHECK(dsum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mix_seed produces distinct streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t base = 0; base < 10; ++base) {
    for (std::uint64_t salt = 0; salt < 10; ++salt) {
      CHECK(seen.insert(mix_seed(base, salt)).second);
    }
  }
}

TEST_CASE("csv split/join round-trip") {
  const std::string line = "a,b,,d";
  auto fields = csv::split(line);
  REQUIRE(fields.size() == 4);
  CHECK(fields[2].empty());
  CHECK(csv::join(fields) == line);
  CHECK(csv::trim("  x y\t") == "x y");
}
