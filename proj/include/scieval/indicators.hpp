#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scieval/corpus.hpp"
#include "scieval/error.hpp"

namespace scieval {

// Field-normalized quality indicators, one normalization pool per
// (subject category, year):
//
//   qi_c_ave   citations / pool mean citations; 1.40 means the publication
//              was cited 40% more often than the pool average.
//   qi_c_perc  percentile standing of the citation count in the pool,
//              0-100, 100 best.
//   qi_if      percentile standing of the journal impact factor against
//              the pool's publication-level impact factors.
//
// Both percentiles use one tie convention: the complement of the
// strictly-greater count over the N-1 other pool members,
//
//   score = 100 * (1 - G / (N - 1)),   singleton pool -> 50.
//
// A publication with several categories enters every one of its pools and
// receives the arithmetic mean of its per-pool values.

struct Pool {
  double mean_citations = 0.0;
  std::vector<double> citations;       // ascending
  std::vector<double> impact_factors;  // ascending, one entry per pooled publication with an IF record
};

class BaselineTable {
 public:
  using Key = std::pair<int, int>;  // (category index, year)

  const Pool* find(int category, int year) const {
    auto it = pools_.find({category, year});
    return it == pools_.end() ? nullptr : &it->second;
  }

  const Pool& at(int category, int year, const Corpus& corpus) const {
    const Pool* pool = find(category, year);
    if (!pool) {
      throw ComputeError("no normalization pool for category '" +
                         corpus.category_ids[category] + "' year " +
                         std::to_string(year));
    }
    return *pool;
  }

  std::map<Key, Pool>& pools() { return pools_; }
  const std::map<Key, Pool>& pools() const { return pools_; }

 private:
  std::map<Key, Pool> pools_;
};

inline BaselineTable build_baselines(const Corpus& corpus) {
  BaselineTable table;
  for (const PublicationRecord& pub : corpus.publications) {
    for (int category : pub.categories) {
      Pool& pool = table.pools()[{category, pub.year}];
      pool.citations.push_back(static_cast<double>(pub.citation_count));
      if (pub.journal >= 0) {
        if (auto impact = corpus.impact_factor(pub.journal, category, pub.year)) {
          pool.impact_factors.push_back(*impact);
        }
      }
    }
  }
  for (auto& [key, pool] : table.pools()) {
    std::sort(pool.citations.begin(), pool.citations.end());
    std::sort(pool.impact_factors.begin(), pool.impact_factors.end());
    double sum = 0.0;
    for (double c : pool.citations) sum += c;
    pool.mean_citations = sum / static_cast<double>(pool.citations.size());
  }
  return table;
}

namespace detail {

// score = 100 * (1 - G/(N-1)) over an ascending multiset; G counts entries
// strictly greater than x. Singleton pools carry no comparative
// information and score 50.
inline double percentile_in_sorted(const std::vector<double>& sorted, double x) {
  const std::size_t n = sorted.size();
  if (n == 1) return 50.0;
  const std::size_t greater =
      sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x);
  return 100.0 * (1.0 - static_cast<double>(greater) / static_cast<double>(n - 1));
}

}  // namespace detail

inline double qi_c_ave(const PublicationRecord& pub, const BaselineTable& baselines,
                       const Corpus& corpus) {
  double sum = 0.0;
  for (int category : pub.categories) {
    const Pool& pool = baselines.at(category, pub.year, corpus);
    if (pool.mean_citations <= 0.0) {
      if (pub.citation_count == 0) continue;  // 0/0 -> 0 by convention
      throw ComputeError("pool for category '" + corpus.category_ids[category] +
                         "' year " + std::to_string(pub.year) +
                         " has zero mean citations; qi_c_ave undefined for '" +
                         pub.id + "'");
    }
    sum += static_cast<double>(pub.citation_count) / pool.mean_citations;
  }
  return sum / static_cast<double>(pub.categories.size());
}

inline double qi_c_perc(const PublicationRecord& pub, const BaselineTable& baselines,
                        const Corpus& corpus) {
  double sum = 0.0;
  for (int category : pub.categories) {
    const Pool& pool = baselines.at(category, pub.year, corpus);
    sum += detail::percentile_in_sorted(pool.citations,
                                        static_cast<double>(pub.citation_count));
  }
  return sum / static_cast<double>(pub.categories.size());
}

// Absent when the journal has no impact-factor record in any of the
// publication's category pools; such publications are skipped in IF-based
// aggregates rather than imputed.
inline std::optional<double> qi_if(const PublicationRecord& pub,
                                   const BaselineTable& baselines,
                                   const Corpus& corpus) {
  if (pub.journal < 0) return std::nullopt;
  double sum = 0.0;
  int pools_with_record = 0;
  for (int category : pub.categories) {
    const auto impact = corpus.impact_factor(pub.journal, category, pub.year);
    if (!impact) continue;
    const Pool& pool = baselines.at(category, pub.year, corpus);
    sum += detail::percentile_in_sorted(pool.impact_factors, *impact);
    ++pools_with_record;
  }
  if (pools_with_record == 0) return std::nullopt;
  return sum / static_cast<double>(pools_with_record);
}

struct PublicationQuality {
  double qi_c_ave = 0.0;
  double qi_c_perc = 0.0;
  std::optional<double> qi_if;
};

inline PublicationQuality publication_quality(const PublicationRecord& pub,
                                              const BaselineTable& baselines,
                                              const Corpus& corpus) {
  return PublicationQuality{qi_c_ave(pub, baselines, corpus),
                            qi_c_perc(pub, baselines, corpus),
                            qi_if(pub, baselines, corpus)};
}

struct ResearcherMetrics {
  int publication_count = 0;             // P
  double fractional_productivity = 0.0;  // FP, sum of 1/total_author_count
  double total_normalized_citations = 0.0;  // C_o, sum of qi_c_ave

  std::optional<double> mean_qi_c_ave;
  std::optional<double> mean_qi_c_perc;
  std::optional<double> mean_qi_if;  // over publications carrying an IF value

  std::optional<double> best_qi_c_ave;
  std::optional<double> best_qi_c_perc;
  std::optional<double> best_qi_if;
};

// One entry per corpus researcher, same order as Corpus::researchers.
inline std::vector<ResearcherMetrics> researcher_metrics(
    const Corpus& corpus, const BaselineTable& baselines) {
  std::vector<ResearcherMetrics> metrics(corpus.researchers.size());
  std::vector<double> sum_perc(corpus.researchers.size(), 0.0);
  std::vector<double> sum_if(corpus.researchers.size(), 0.0);
  std::vector<int> count_if(corpus.researchers.size(), 0);

  for (const PublicationRecord& pub : corpus.publications) {
    if (pub.authors.empty()) continue;  // in the pools, attributed to nobody
    const PublicationQuality q = publication_quality(pub, baselines, corpus);
    const double share = 1.0 / static_cast<double>(pub.total_author_count);
    for (int author : pub.authors) {
      ResearcherMetrics& m = metrics[author];
      m.publication_count += 1;
      m.fractional_productivity += share;
      m.total_normalized_citations += q.qi_c_ave;
      sum_perc[author] += q.qi_c_perc;
      auto take_max = [](std::optional<double>& best, double v) {
        if (!best || v > *best) best = v;
      };
      take_max(m.best_qi_c_ave, q.qi_c_ave);
      take_max(m.best_qi_c_perc, q.qi_c_perc);
      if (q.qi_if) {
        take_max(m.best_qi_if, *q.qi_if);
        sum_if[author] += *q.qi_if;
        count_if[author] += 1;
      }
    }
  }

  for (std::size_t i = 0; i < metrics.size(); ++i) {
    ResearcherMetrics& m = metrics[i];
    if (m.publication_count > 0) {
      m.mean_qi_c_ave =
          m.total_normalized_citations / static_cast<double>(m.publication_count);
      m.mean_qi_c_perc = sum_perc[i] / static_cast<double>(m.publication_count);
    }
    if (count_if[i] > 0) {
      m.mean_qi_if = sum_if[i] / static_cast<double>(count_if[i]);
    }
  }
  return metrics;
}

}  // namespace scieval
