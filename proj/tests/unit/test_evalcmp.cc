#include <cmath>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "peoplegaz/error.h"
#include "peoplegaz/evalcmp.h"
#include "synthetic.h"

namespace pg = peoplegaz;

namespace {

std::vector<double> midranks_of_abs(const std::vector<double>& d) {
  std::vector<double> r(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    double below = 0, equal = 0;
    for (double x : d) {
      if (std::abs(x) < std::abs(d[i])) ++below;
      if (std::abs(x) == std::abs(d[i])) ++equal;
    }
    r[i] = below + (equal + 1) / 2;
  }
  return r;
}

// Exact one-tailed P(min(W+, W-) <= w) by enumerating every sign pattern.
double exact_one_tailed(const std::vector<double>& d) {
  const auto ranks = midranks_of_abs(d);
  double w_plus = 0, total = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    total += ranks[i];
    if (d[i] > 0) w_plus += ranks[i];
  }
  const double w = std::min(w_plus, total - w_plus);
  const std::size_t n = d.size();
  std::size_t hits = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) s += ranks[i];
    if (s <= w + 1e-9) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(std::size_t{1} << n);
}

// Same probability for ranks 1..n without ties, by counting subset sums.
double exact_one_tailed_untied(std::size_t n, long w) {
  std::vector<double> ways(n * (n + 1) / 2 + 1, 0.0);
  ways[0] = 1;
  for (std::size_t r = 1; r <= n; ++r)
    for (std::size_t s = ways.size() - 1; s >= r; --s) ways[s] += ways[s - r];
  double hits = 0;
  for (long s = 0; s <= w; ++s) hits += ways[static_cast<std::size_t>(s)];
  return hits / std::ldexp(1.0, static_cast<int>(n));
}

std::vector<pg::RankedPerson> listing(const std::vector<std::string>& names, const std::vector<double>& ipis) {
  std::vector<pg::RankedPerson> out;
  for (std::size_t i = 0; i < names.size(); ++i) out.push_back({names[i], i + 1, ipis[i]});
  return out;
}

}  // namespace

TEST_SUITE("evalcmp") {
  TEST_CASE("all-zero differences are degenerate") {
    const auto r = pg::wilcoxon_signed_rank(std::vector<double>{0, 0, 0});
    CHECK(r.degenerate);
    CHECK(r.n_effective == 0);
    CHECK(pg::wilcoxon_signed_rank(std::vector<double>{}).degenerate);
  }

  TEST_CASE("three positive differences") {
    const std::vector<double> d = {1, 2, 3};
    CHECK(exact_one_tailed(d) == 0.125);
    const auto r = pg::wilcoxon_signed_rank(d);
    CHECK_FALSE(r.degenerate);
    CHECK(r.w_plus == 6);
    CHECK(r.w_minus == 0);
    CHECK(r.w == 0);
    CHECK(r.z < 0);
    // Three samples are far from normal; the approximation is only in the neighbourhood.
    CHECK(std::abs(r.p_one_tailed - 0.125) < 0.05);
    CHECK(r.p_two_tailed == doctest::Approx(2 * r.p_one_tailed));
  }

  TEST_CASE("normal cdf") {
    CHECK(pg::standard_normal_cdf(0) == doctest::Approx(0.5));
    CHECK(pg::standard_normal_cdf(-1.959963985) == doctest::Approx(0.025).epsilon(1e-6));
  }

  TEST_CASE("twelve samples against exhaustive enumeration") {
    pg::testing::TestRng rng(12);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<double> d;
      while (d.size() < 12) {
        const long v = static_cast<long>(rng.below(21)) - 10;
        if (v != 0) d.push_back(static_cast<double>(v));
      }
      const double p_sign = exact_one_tailed(d);
      CHECK(std::abs(pg::wilcoxon_signed_rank(d).p_one_tailed - p_sign) <= 0.02);
    }
  }

  TEST_CASE("large samples converge to the exact distribution") {
    pg::testing::TestRng rng(25);
    double worst = 0;
    for (int trial = 0; trial < 60; ++trial) {
      const std::size_t n = 25 + rng.below(40);
      std::vector<double> d;
      for (std::size_t r = 1; r <= n; ++r) d.push_back(rng.chance(0.4) ? static_cast<double>(r) : -static_cast<double>(r));
      const auto res = pg::wilcoxon_signed_rank(d);
      const double exact = exact_one_tailed_untied(n, static_cast<long>(res.w));
      worst = std::max(worst, std::abs(res.p_one_tailed - std::min(1.0, exact)));
    }
    CHECK(worst <= 0.01);
  }

  TEST_CASE("signed rank sums and swap invariance") {
    pg::testing::TestRng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> d;
      const std::size_t n = 1 + rng.below(40);
      for (std::size_t i = 0; i < n; ++i) d.push_back(static_cast<double>(rng.below(11)) - 5);
      const auto r = pg::wilcoxon_signed_rank(d);
      if (r.degenerate) continue;
      const double m = static_cast<double>(r.n_effective);
      CHECK(std::abs(r.w_plus + r.w_minus - m * (m + 1) / 2) < 1e-9);
      std::vector<double> neg;
      for (double x : d) neg.push_back(-x);
      const auto s = pg::wilcoxon_signed_rank(neg);
      CHECK(s.p_two_tailed == doctest::Approx(r.p_two_tailed));
      CHECK(std::abs(s.z) == doctest::Approx(std::abs(r.z)));
      CHECK(s.w_plus == r.w_minus);
    }
  }

  TEST_CASE("average IPI buckets") {
    std::vector<double> ipis;
    for (int i = 0; i < 10; ++i) ipis.push_back(10 - i);
    std::vector<std::string> names;
    for (int i = 0; i < 10; ++i) names.push_back("p" + std::to_string(i));
    const auto b = pg::average_ipi_buckets(listing(names, ipis), 5);
    REQUIRE(b.size() == 2);
    CHECK(b[0].first_rank == 1);
    CHECK(b[0].last_rank == 5);
    CHECK(b[0].mean_ipi == doctest::Approx(8.0));
    CHECK(b[1].mean_ipi == doctest::Approx(3.0));
    const auto short_last = pg::average_ipi_buckets(listing(names, ipis), 4);
    REQUIRE(short_last.size() == 3);
    CHECK(short_last[2].last_rank == 10);
    CHECK(short_last[2].mean_ipi == doctest::Approx(1.5));
    const auto flat = pg::average_ipi_buckets(listing(names, std::vector<double>(10, 2.5)), 3);
    for (const auto& x : flat) CHECK(x.mean_ipi == 2.5);
    CHECK_THROWS_AS(pg::average_ipi_buckets(listing(names, ipis), 0), pg::Error);
    CHECK_THROWS_AS(pg::average_ipi_buckets(listing(names, ipis), -2), pg::Error);
  }

  TEST_CASE("identical lists") {
    const auto l = listing({"a", "b", "c"}, {3, 2, 1});
    const auto r = pg::compare_lists(l, l, 2);
    REQUIRE(r.samples.size() == 3);
    for (const auto& s : r.samples) CHECK(s.difference() == 0);
    CHECK(r.wilcoxon.degenerate);
    const auto json = nlohmann::json::parse(pg::comparison_json(r));
    CHECK(json["wilcoxon"]["p_two_tailed"].is_null());
  }

  TEST_CASE("reversed list of five") {
    const auto l1 = listing({"a", "b", "c", "d", "e"}, {5, 4, 3, 2, 1});
    const auto l2 = listing({"e", "d", "c", "b", "a"}, {5, 4, 3, 2, 1});
    const auto r = pg::compare_lists(l1, l2, 5);
    std::vector<double> deltas;
    for (const auto& s : r.samples) deltas.push_back(static_cast<double>(s.difference()));
    CHECK(deltas == std::vector<double>{-4, -2, 0, 2, 4});
    CHECK(r.wilcoxon.n_effective == 4);
    CHECK(r.wilcoxon.w_plus == r.wilcoxon.w_minus);
    const std::vector<double> nonzero = {-4, -2, 2, 4};
    CHECK(r.wilcoxon.p_two_tailed == doctest::Approx(std::min(1.0, 2 * exact_one_tailed(nonzero))));
  }

  TEST_CASE("partial overlap and disjoint lists") {
    const auto r = pg::compare_lists(listing({"a", "b", "x"}, {3, 2, 1}), listing({"b", "y", "a"}, {3, 2, 1}), 10);
    CHECK(r.samples.size() == 2);
    CHECK(r.only_in_l1 == std::vector<std::string>{"x"});
    CHECK(r.only_in_l2 == std::vector<std::string>{"y"});
    CHECK_THROWS_AS(pg::compare_lists(listing({"a"}, {1}), listing({"b"}, {1})), pg::Error);
    CHECK_THROWS_AS(pg::compare_lists(listing({"a", "a"}, {1, 1}), listing({"a"}, {1})), pg::Error);
  }

  TEST_CASE("ranking CSV round trip") {
    const auto dir = pg::testing::scratch_dir("evalcmp-csv");
    std::ofstream(dir / "r.csv") << "position,rank,person,ipi,n_articles\n"
                                    "1,1,\"smith, john\",3.25,4\n"
                                    "2,2,\"o\"\"brien\",2.5,1\n";
    const auto r = pg::read_ranking_csv(dir / "r.csv");
    REQUIRE(r.size() == 2);
    CHECK(r[0].person == "smith, john");
    CHECK(r[1].person == "o\"brien");
    CHECK(r[1].rank == 2);
    CHECK(r[1].ipi == 2.5);
    std::ofstream(dir / "bad.csv") << "person,ipi\nx,1\n";
    CHECK_THROWS_AS(pg::read_ranking_csv(dir / "bad.csv"), pg::Error);
  }

  TEST_CASE("bucket CSV carries both lists") {
    const auto l = listing({"a", "b", "c", "d"}, {4, 3, 2, 1});
    const auto csv = pg::buckets_csv(pg::compare_lists(l, l, 2));
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= 3);
  }
}
