#include "peoplegaz/evalcmp.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "peoplegaz/error.h"

namespace peoplegaz {

namespace fs = std::filesystem;

std::vector<RankedPerson> to_ranked(const std::vector<InfluenceRecord>& records) {
  std::vector<RankedPerson> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    out.push_back({records[i].person, records[i].position ? records[i].position : i + 1, records[i].ipi});
  }
  return out;
}

namespace {

// RFC 4180 style: fields may be quoted, quotes doubled inside.
std::vector<std::string> split_csv_line(const std::string& line, const std::string& file, std::size_t line_no) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ParseError(file, line_no, "unterminated quoted field");
  out.push_back(std::move(cur));
  return out;
}

}  // namespace

std::vector<RankedPerson> read_ranking_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  const std::string file = path.string();
  std::string line;
  if (!std::getline(in, line)) throw ParseError(file, 1, "empty ranking file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line, file, 1);
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError(file, 1, "missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_pos = column("position"), c_person = column("person"), c_ipi = column("ipi");
  std::vector<RankedPerson> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line, file, line_no);
    if (f.size() != header.size()) throw ParseError(file, line_no, "wrong number of columns");
    RankedPerson p;
    p.person = f[c_person];
    const auto& pos = f[c_pos];
    const auto& ipi = f[c_ipi];
    if (std::from_chars(pos.data(), pos.data() + pos.size(), p.rank).ptr != pos.data() + pos.size() || p.rank == 0)
      throw ParseError(file, line_no, "bad position '" + pos + "'");
    if (std::from_chars(ipi.data(), ipi.data() + ipi.size(), p.ipi).ptr != ipi.data() + ipi.size())
      throw ParseError(file, line_no, "bad ipi '" + ipi + "'");
    out.push_back(std::move(p));
  }
  return out;
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& differences) {
  std::vector<double> d;
  for (double x : differences) {
    if (x != 0.0) d.push_back(x);
  }
  WilcoxonResult r;
  r.n_effective = d.size();
  if (d.empty()) return r;
  r.degenerate = false;

  std::vector<std::size_t> order(d.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return std::abs(d[a]) < std::abs(d[b]); });

  double tie_term = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && std::abs(d[order[j]]) == std::abs(d[order[i]])) ++j;
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) (d[order[k]] > 0 ? r.w_plus : r.w_minus) += mid_rank;
    i = j;
  }

  const double n = static_cast<double>(d.size());
  const double mean = n * (n + 1.0) / 4.0;
  const double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  r.w = std::min(r.w_plus, r.w_minus);
  r.z = variance > 0.0 ? (r.w - mean + 0.5) / std::sqrt(variance) : 0.0;
  r.p_one_tailed = standard_normal_cdf(r.z);
  r.p_two_tailed = std::min(1.0, 2.0 * r.p_one_tailed);
  return r;
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<RankPairSample>& samples) {
  std::vector<double> d;
  d.reserve(samples.size());
  for (const auto& s : samples) d.push_back(static_cast<double>(s.difference()));
  return wilcoxon_signed_rank(d);
}

std::vector<IpiBucket> average_ipi_buckets(const std::vector<RankedPerson>& ranked, long bucket_size) {
  if (bucket_size <= 0) throw Error("bucket size must be positive");
  const auto size = static_cast<std::size_t>(bucket_size);
  std::vector<IpiBucket> out;
  for (std::size_t b = 0; b < ranked.size(); b += size) {
    const std::size_t e = std::min(ranked.size(), b + size);
    double sum = 0.0;
    for (std::size_t i = b; i < e; ++i) sum += ranked[i].ipi;
    out.push_back({b + 1, e, sum / static_cast<double>(e - b)});
  }
  return out;
}

ComparisonReport compare_lists(const std::vector<RankedPerson>& l1, const std::vector<RankedPerson>& l2,
                               long bucket_size) {
  auto index = [](const std::vector<RankedPerson>& l, const char* which) {
    std::map<std::string, std::size_t> m;
    for (const auto& p : l) {
      if (!m.emplace(p.person, p.rank).second)
        throw Error(std::string("person '") + p.person + "' appears twice in " + which);
    }
    return m;
  };
  const auto m1 = index(l1, "L1");
  const auto m2 = index(l2, "L2");
  ComparisonReport rep;
  for (const auto& p : l1) {
    auto it = m2.find(p.person);
    if (it == m2.end()) {
      rep.only_in_l1.push_back(p.person);
    } else {
      rep.samples.push_back({p.person, static_cast<long>(p.rank), static_cast<long>(it->second)});
    }
  }
  for (const auto& p : l2) {
    if (!m1.count(p.person)) rep.only_in_l2.push_back(p.person);
  }
  if (rep.samples.empty()) throw Error("the two ranked lists share no person");
  std::stable_sort(rep.samples.begin(), rep.samples.end(),
                   [](const RankPairSample& a, const RankPairSample& b) { return a.rank_l1 < b.rank_l1; });
  rep.wilcoxon = wilcoxon_signed_rank(rep.samples);
  rep.buckets_l1 = average_ipi_buckets(l1, bucket_size);
  rep.buckets_l2 = average_ipi_buckets(l2, bucket_size);
  return rep;
}

std::string comparison_json(const ComparisonReport& rep) {
  using nlohmann::ordered_json;
  const auto& w = rep.wilcoxon;
  ordered_json wil = {{"n_effective", w.n_effective}, {"degenerate", w.degenerate}, {"w_plus", w.w_plus},
                      {"w_minus", w.w_minus},         {"w", w.w}};
  if (w.degenerate) {
    wil["z"] = nullptr;
    wil["p_two_tailed"] = nullptr;
    wil["p_one_tailed"] = nullptr;
  } else {
    wil["z"] = w.z;
    wil["p_two_tailed"] = w.p_two_tailed;
    wil["p_one_tailed"] = w.p_one_tailed;
  }
  ordered_json deltas = ordered_json::array();
  for (const auto& s : rep.samples) {
    deltas.push_back({{"person", s.person}, {"rank_l1", s.rank_l1}, {"rank_l2", s.rank_l2},
                      {"difference", s.difference()}});
  }
  auto buckets = [](const std::vector<IpiBucket>& bs) {
    ordered_json a = ordered_json::array();
    for (const auto& b : bs) a.push_back({{"first_rank", b.first_rank}, {"last_rank", b.last_rank}, {"mean_ipi", b.mean_ipi}});
    return a;
  };
  ordered_json root = {{"paired", rep.samples.size()},
                       {"only_in_l1", rep.only_in_l1},
                       {"only_in_l2", rep.only_in_l2},
                       {"wilcoxon", std::move(wil)},
                       {"buckets_l1", buckets(rep.buckets_l1)},
                       {"buckets_l2", buckets(rep.buckets_l2)},
                       {"rank_deltas", std::move(deltas)}};
  return root.dump(2) + "\n";
}

std::string buckets_csv(const ComparisonReport& rep) {
  std::ostringstream out;
  out.precision(17);
  out << "list,first_rank,last_rank,mean_ipi\n";
  for (const auto& b : rep.buckets_l1) out << "L1," << b.first_rank << ',' << b.last_rank << ',' << b.mean_ipi << '\n';
  for (const auto& b : rep.buckets_l2) out << "L2," << b.first_rank << ',' << b.last_rank << ',' << b.mean_ipi << '\n';
  return out.str();
}

}  // namespace peoplegaz
