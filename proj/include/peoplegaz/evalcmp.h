#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "peoplegaz/influence.h"

namespace peoplegaz {

// One person as it appears in a ranked list.
struct RankedPerson {
  std::string person;
  std::size_t rank = 0;  // strict position
  double ipi = 0.0;
};

std::vector<RankedPerson> to_ranked(const std::vector<InfluenceRecord>& records);
// Reads the `position`, `person` and `ipi` columns of a ranking CSV.
std::vector<RankedPerson> read_ranking_csv(const std::filesystem::path& path);

struct RankPairSample {
  std::string person;
  long rank_l1 = 0;
  long rank_l2 = 0;
  long difference() const { return rank_l1 - rank_l2; }
};

struct WilcoxonResult {
  std::size_t n_effective = 0;  // nonzero differences
  double w_plus = 0.0;
  double w_minus = 0.0;
  double w = 0.0;  // min(W+, W-)
  double z = 0.0;
  double p_two_tailed = 1.0;
  double p_one_tailed = 1.0;
  bool degenerate = true;  // no nonzero difference, p values meaningless
};

// Normal approximation with mid-ranks for ties, tie-corrected variance and a
// 0.5 continuity correction.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& differences);
WilcoxonResult wilcoxon_signed_rank(const std::vector<RankPairSample>& samples);

double standard_normal_cdf(double z);

struct IpiBucket {
  std::size_t first_rank = 0;
  std::size_t last_rank = 0;
  double mean_ipi = 0.0;
};

// Consecutive buckets of `bucket_size` in list order; the last may be short.
std::vector<IpiBucket> average_ipi_buckets(const std::vector<RankedPerson>& ranked, long bucket_size);

struct ComparisonReport {
  std::vector<RankPairSample> samples;  // persons in both lists, by L1 rank
  std::vector<std::string> only_in_l1;
  std::vector<std::string> only_in_l2;
  WilcoxonResult wilcoxon;
  std::vector<IpiBucket> buckets_l1;
  std::vector<IpiBucket> buckets_l2;
};

ComparisonReport compare_lists(const std::vector<RankedPerson>& l1, const std::vector<RankedPerson>& l2,
                               long bucket_size = 100);

std::string comparison_json(const ComparisonReport& report);
std::string buckets_csv(const ComparisonReport& report);

}  // namespace peoplegaz
