#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scieval/config.hpp"
#include "scieval/corpus.hpp"
#include "scieval/indicators.hpp"
#include "scieval/ranking.hpp"
#include "scieval/stats.hpp"
#include "scieval/table.hpp"
#include "scieval/version.hpp"

namespace scieval {

enum class RegressionMode { total_citations, best_publication };
enum class QualityScope { all_publications, best_publication };
enum class SelectionMode { by_p, by_fp, intersection };

inline std::string to_string(SelectionMode mode) {
  switch (mode) {
    case SelectionMode::by_p: return "P";
    case SelectionMode::by_fp: return "FP";
    default: return "P&FP";
  }
}

// ---------------------------------------------------------------------------
// per-SDS populations and top/rest partitions

struct SdsPartition {
  int sds = -1;
  std::vector<int> population;         // publishing researchers (corpus indexes)
  std::vector<std::size_t> top, rest;  // indexes into population
};

// Publishing researchers of each eligible SDS, split into the top
// `fraction` by the selection indicator (ties at the cutoff included).
// SDS whose partition would leave either group empty are skipped with a
// warning; ragged sectors must not fail the run.
inline std::vector<SdsPartition> build_sds_partitions(
    const Corpus& corpus, const std::vector<ResearcherMetrics>& metrics,
    const std::vector<int>& eligible_sds, SelectionMode mode, double fraction,
    std::vector<std::string>* warnings = nullptr) {
  std::vector<std::vector<int>> by_sds(corpus.sds.size());
  for (std::size_t i = 0; i < corpus.researchers.size(); ++i) {
    if (metrics[i].publication_count >= 1) {
      by_sds[corpus.researchers[i].sds].push_back(static_cast<int>(i));
    }
  }
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };

  std::vector<SdsPartition> out;
  for (int sds : eligible_sds) {
    SdsPartition part;
    part.sds = sds;
    part.population = by_sds[sds];
    const std::size_t n = part.population.size();
    if (n == 0) {
      warn("sds '" + corpus.sds[sds].id + "': no publishing researchers; skipped");
      continue;
    }
    auto values_for = [&](ProductivityIndicator ind) {
      std::vector<double> values(n);
      for (std::size_t k = 0; k < n; ++k) {
        const ResearcherMetrics& m = metrics[part.population[k]];
        values[k] = ind == ProductivityIndicator::P
                        ? static_cast<double>(m.publication_count)
                        : m.fractional_productivity;
      }
      return values;
    };
    if (mode == SelectionMode::intersection) {
      const auto top_p = ranking::select_top(values_for(ProductivityIndicator::P), fraction).top;
      const auto top_fp = ranking::select_top(values_for(ProductivityIndicator::FP), fraction).top;
      std::vector<char> in_p(n, 0);
      for (std::size_t k : top_p) in_p[k] = 1;
      std::vector<char> in_both(n, 0);
      for (std::size_t k : top_fp) {
        if (in_p[k]) in_both[k] = 1;
      }
      for (std::size_t k = 0; k < n; ++k) {
        if (in_both[k]) part.top.push_back(k);
        else part.rest.push_back(k);
      }
    } else {
      const auto values = values_for(mode == SelectionMode::by_p
                                         ? ProductivityIndicator::P
                                         : ProductivityIndicator::FP);
      auto partition = ranking::select_top(values, fraction);
      part.top = std::move(partition.top);
      part.rest = std::move(partition.rest);
    }
    if (part.top.empty()) {
      warn("sds '" + corpus.sds[sds].id + "': empty top group under " +
           to_string(mode) + "; skipped");
      continue;
    }
    if (part.rest.empty()) {
      warn("sds '" + corpus.sds[sds].id + "': empty rest group under " +
           to_string(mode) + "; skipped");
      continue;
    }
    out.push_back(std::move(part));
  }
  return out;
}

// ---------------------------------------------------------------------------
// researcher-level %-ranks within SDS

enum class RankedIndicator {
  p = 0,
  fp,
  mean_qi_c_ave,
  mean_qi_c_perc,
  mean_qi_if,
  best_qi_c_ave,
  best_qi_c_perc,
  best_qi_if,
};
inline constexpr std::size_t kRankedIndicatorCount = 8;

inline std::optional<double> raw_indicator_value(const ResearcherMetrics& m,
                                                 RankedIndicator ind) {
  switch (ind) {
    case RankedIndicator::p:
      return m.publication_count >= 1
                 ? std::optional<double>(static_cast<double>(m.publication_count))
                 : std::nullopt;
    case RankedIndicator::fp:
      return m.publication_count >= 1
                 ? std::optional<double>(m.fractional_productivity)
                 : std::nullopt;
    case RankedIndicator::mean_qi_c_ave: return m.mean_qi_c_ave;
    case RankedIndicator::mean_qi_c_perc: return m.mean_qi_c_perc;
    case RankedIndicator::mean_qi_if: return m.mean_qi_if;
    case RankedIndicator::best_qi_c_ave: return m.best_qi_c_ave;
    case RankedIndicator::best_qi_c_perc: return m.best_qi_c_perc;
    default: return m.best_qi_if;
  }
}

// (researcher, indicator) -> %-rank among the publishing researchers of the
// researcher's SDS that carry a value for the indicator. Impact-factor
// indicators are undefined for researchers without any IF-bearing
// publication; those researchers are left out of the IF rank pools.
struct PercentRankTable {
  std::vector<std::array<std::optional<double>, kRankedIndicatorCount>> by_researcher;

  std::optional<double> rank(int researcher, RankedIndicator ind) const {
    return by_researcher[researcher][static_cast<std::size_t>(ind)];
  }
};

inline PercentRankTable compute_percent_ranks(const Corpus& corpus,
                                              const std::vector<ResearcherMetrics>& metrics,
                                              const std::vector<int>& eligible_sds) {
  PercentRankTable table;
  table.by_researcher.resize(corpus.researchers.size());

  std::vector<std::vector<int>> by_sds(corpus.sds.size());
  for (std::size_t i = 0; i < corpus.researchers.size(); ++i) {
    if (metrics[i].publication_count >= 1) {
      by_sds[corpus.researchers[i].sds].push_back(static_cast<int>(i));
    }
  }

  std::vector<double> values;
  std::vector<int> holders;
  for (int sds : eligible_sds) {
    for (std::size_t ind = 0; ind < kRankedIndicatorCount; ++ind) {
      values.clear();
      holders.clear();
      for (int r : by_sds[sds]) {
        if (auto v = raw_indicator_value(metrics[r], static_cast<RankedIndicator>(ind))) {
          values.push_back(*v);
          holders.push_back(r);
        }
      }
      if (values.empty()) continue;
      const std::vector<double> ranks = ranking::percent_ranks(values);
      for (std::size_t k = 0; k < holders.size(); ++k) {
        table.by_researcher[holders[k]][ind] = ranks[k];
      }
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// regression analysis (Tables 1 and 5)

struct RegressionRow {
  std::string uda;  // uda id, or "Total"
  int n_obs = 0;
  std::optional<stats::RegressionResult> result;
  std::string note;  // "insufficient-data" or "degenerate-design" when unset
};

struct RegressionTable {
  RegressionMode mode = RegressionMode::total_citations;
  std::vector<RegressionRow> rows;
};

// log C_o (mode total_citations) or log best qi_c_ave (mode
// best_publication) against log P, per UDA plus a pooled Total row.
// Subjects are the publishing researchers of eligible SDS with C_o > 0.
inline RegressionTable run_regression_analysis(
    const Corpus& corpus, const std::vector<ResearcherMetrics>& metrics,
    const std::vector<int>& eligible_sds, RegressionMode mode,
    std::vector<std::string>* warnings = nullptr) {
  std::vector<char> sds_eligible(corpus.sds.size(), 0);
  for (int sds : eligible_sds) sds_eligible[sds] = 1;

  std::map<std::string, std::vector<std::pair<double, double>>> per_uda;
  std::vector<std::pair<double, double>> pooled;
  for (std::size_t i = 0; i < corpus.researchers.size(); ++i) {
    const ResearcherRecord& r = corpus.researchers[i];
    if (!sds_eligible[r.sds]) continue;
    const ResearcherMetrics& m = metrics[i];
    if (m.publication_count < 1 || !(m.total_normalized_citations > 0.0)) continue;
    const double response = mode == RegressionMode::total_citations
                                ? m.total_normalized_citations
                                : m.best_qi_c_ave.value();
    if (!(response > 0.0)) continue;
    const auto pair = std::make_pair(static_cast<double>(m.publication_count), response);
    per_uda[corpus.uda_ids[corpus.sds[r.sds].uda]].push_back(pair);
    pooled.push_back(pair);
  }

  RegressionTable table;
  table.mode = mode;
  auto fit_row = [&](const std::string& label,
                     const std::vector<std::pair<double, double>>& pairs) {
    RegressionRow row;
    row.uda = label;
    row.n_obs = static_cast<int>(pairs.size());
    if (pairs.size() < 3) {
      row.note = "insufficient-data";
      if (warnings) {
        warnings->push_back("regression: uda '" + label + "' has " +
                            std::to_string(pairs.size()) +
                            " eligible subjects (< 3); row flagged");
      }
      return row;
    }
    try {
      row.result = stats::ols_loglog(pairs);
    } catch (const ComputeError& e) {
      row.note = "degenerate-design";
      if (warnings) {
        warnings->push_back("regression: uda '" + label + "': " + e.what());
      }
    }
    return row;
  };
  for (const auto& [uda, pairs] : per_uda) {
    table.rows.push_back(fit_row(uda, pairs));
  }
  table.rows.push_back(fit_row("Total", pooled));
  return table;
}

// ---------------------------------------------------------------------------
// top scientists vs the rest (Tables 2, 3, 4 and 6)

struct MeanDiffCells {
  std::optional<double> qi_c_ave, qi_c_perc, qi_if;
};

struct SdsCountRow {
  std::string uda;  // uda id, or "Total"
  int sds_total = 0;
  int qi_c_ave = 0, qi_c_perc = 0, qi_if = 0;
};

struct ComparisonResult {
  QualityScope scope = QualityScope::all_publications;
  SelectionMode selection = SelectionMode::by_p;
  MeanDiffCells overall;                                    // researcher-pooled
  std::vector<std::pair<std::string, MeanDiffCells>> by_uda;  // + "Total"
  std::vector<SdsCountRow> sds_counts;                       // + "Total"
};

namespace detail {

struct DiffAccumulator {
  double top_sum = 0.0, rest_sum = 0.0;
  std::size_t top_n = 0, rest_n = 0;

  std::optional<double> difference() const {
    if (top_n == 0 || rest_n == 0) return std::nullopt;
    return top_sum / static_cast<double>(top_n) -
           rest_sum / static_cast<double>(rest_n);
  }
};

}  // namespace detail

// Mean %-rank difference between the top group and the rest for each
// quality indicator: researcher-pooled overall, per UDA, and the number of
// SDS in which the top group's mean exceeds the rest's.
inline ComparisonResult run_top_vs_rest(const Corpus& corpus,
                                        const PercentRankTable& ranks,
                                        const std::vector<SdsPartition>& partitions,
                                        QualityScope scope,
                                        SelectionMode selection) {
  const std::array<RankedIndicator, 3> indicators =
      scope == QualityScope::all_publications
          ? std::array<RankedIndicator, 3>{RankedIndicator::mean_qi_c_ave,
                                           RankedIndicator::mean_qi_c_perc,
                                           RankedIndicator::mean_qi_if}
          : std::array<RankedIndicator, 3>{RankedIndicator::best_qi_c_ave,
                                           RankedIndicator::best_qi_c_perc,
                                           RankedIndicator::best_qi_if};

  std::array<detail::DiffAccumulator, 3> overall;
  std::map<std::string, std::array<detail::DiffAccumulator, 3>> by_uda;
  std::map<std::string, std::array<int, 3>> counts;
  std::map<std::string, int> sds_totals;

  for (const SdsPartition& part : partitions) {
    const std::string uda = corpus.uda_ids[corpus.sds[part.sds].uda];
    sds_totals[uda] += 1;
    by_uda[uda];  // materialize the row even if every cell stays empty
    counts[uda];
    for (std::size_t q = 0; q < 3; ++q) {
      detail::DiffAccumulator local;
      for (std::size_t k : part.top) {
        if (auto rank = ranks.rank(part.population[k], indicators[q])) {
          local.top_sum += *rank;
          ++local.top_n;
        }
      }
      for (std::size_t k : part.rest) {
        if (auto rank = ranks.rank(part.population[k], indicators[q])) {
          local.rest_sum += *rank;
          ++local.rest_n;
        }
      }
      if (local.top_n == 0 || local.rest_n == 0) continue;
      overall[q].top_sum += local.top_sum;
      overall[q].top_n += local.top_n;
      overall[q].rest_sum += local.rest_sum;
      overall[q].rest_n += local.rest_n;
      auto& uda_acc = by_uda[uda][q];
      uda_acc.top_sum += local.top_sum;
      uda_acc.top_n += local.top_n;
      uda_acc.rest_sum += local.rest_sum;
      uda_acc.rest_n += local.rest_n;
      if (*local.difference() > 0.0) counts[uda][q] += 1;
    }
  }

  ComparisonResult result;
  result.scope = scope;
  result.selection = selection;
  result.overall = MeanDiffCells{overall[0].difference(), overall[1].difference(),
                                 overall[2].difference()};
  int total_sds = 0;
  std::array<int, 3> total_counts{0, 0, 0};
  for (const auto& [uda, accs] : by_uda) {
    result.by_uda.emplace_back(
        uda, MeanDiffCells{accs[0].difference(), accs[1].difference(),
                           accs[2].difference()});
    SdsCountRow row;
    row.uda = uda;
    row.sds_total = sds_totals[uda];
    row.qi_c_ave = counts[uda][0];
    row.qi_c_perc = counts[uda][1];
    row.qi_if = counts[uda][2];
    result.sds_counts.push_back(row);
    total_sds += row.sds_total;
    for (std::size_t q = 0; q < 3; ++q) total_counts[q] += counts[uda][q];
  }
  result.by_uda.emplace_back("Total", result.overall);
  SdsCountRow total_row;
  total_row.uda = "Total";
  total_row.sds_total = total_sds;
  total_row.qi_c_ave = total_counts[0];
  total_row.qi_c_perc = total_counts[1];
  total_row.qi_if = total_counts[2];
  result.sds_counts.push_back(total_row);
  return result;
}

// ---------------------------------------------------------------------------
// rank-sum distance analysis over best publications (Table 7)

struct RankSumAnalysis {
  SelectionMode selection = SelectionMode::by_p;
  QualityIndicator quality = QualityIndicator::QiCAve;
  std::vector<std::pair<std::string, stats::RankVerdict>> sds_verdicts;
  std::vector<std::pair<std::string, int>> counts_by_uda;  // verdict favored rest; + "Total"
};

inline RankSumAnalysis run_rank_sum_analysis(
    const Corpus& corpus, const std::vector<ResearcherMetrics>& metrics,
    const std::vector<SdsPartition>& partitions, QualityIndicator quality,
    SelectionMode selection, std::vector<std::string>* warnings = nullptr) {
  RankSumAnalysis analysis;
  analysis.selection = selection;
  analysis.quality = quality;

  auto best_value = [&](int researcher) -> std::optional<double> {
    const ResearcherMetrics& m = metrics[researcher];
    switch (quality) {
      case QualityIndicator::QiCAve: return m.best_qi_c_ave;
      case QualityIndicator::QiCPerc: return m.best_qi_c_perc;
      default: return m.best_qi_if;
    }
  };

  std::map<std::string, int> counts;
  for (const SdsPartition& part : partitions) {
    const std::string uda = corpus.uda_ids[corpus.sds[part.sds].uda];
    counts[uda];
    std::vector<stats::RankSumEntry> entries;
    entries.reserve(part.population.size());
    std::vector<char> is_top(part.population.size(), 0);
    for (std::size_t k : part.top) is_top[k] = 1;
    for (std::size_t k = 0; k < part.population.size(); ++k) {
      if (auto v = best_value(part.population[k])) {
        entries.push_back(stats::RankSumEntry{is_top[k] != 0, *v});
      }
    }
    bool has_top = false, has_rest = false;
    for (const auto& e : entries) (e.is_top ? has_top : has_rest) = true;
    if (entries.size() < 2 || !has_top || !has_rest) {
      if (warnings) {
        warnings->push_back("rank-sum: sds '" + corpus.sds[part.sds].id +
                            "' lacks ranked subjects in both groups for " +
                            to_string(quality) + "; skipped");
      }
      continue;
    }
    const stats::RankSumComparison cmp = stats::rank_sum_distance(entries);
    analysis.sds_verdicts.emplace_back(corpus.sds[part.sds].id, cmp.verdict);
    if (cmp.verdict == stats::RankVerdict::others) counts[uda] += 1;
  }

  int total = 0;
  for (const auto& [uda, count] : counts) {
    analysis.counts_by_uda.emplace_back(uda, count);
    total += count;
  }
  analysis.counts_by_uda.emplace_back("Total", total);
  return analysis;
}

// ---------------------------------------------------------------------------
// whole-run orchestration

struct AnalysisRun {
  EngineConfig config;
  std::vector<std::pair<std::string, std::string>> input_checksums;  // (file, fnv1a64)

  std::vector<std::string> eligible_sds;
  std::size_t researcher_count = 0;   // after the stability filter
  std::size_t publication_count = 0;
  std::vector<std::string> warnings;

  std::vector<ResearcherMetrics> metrics;  // aligned with the filtered corpus
  PercentRankTable percent_ranks;

  RegressionTable regression_total;
  RegressionTable regression_best;
  ComparisonResult all_pubs_by_p, all_pubs_by_fp;
  ComparisonResult best_pub_by_p, best_pub_by_fp;
  ComparisonResult configured_all_pubs;  // table3/table4 selection (honors intersection_mode)
  std::vector<RankSumAnalysis> rank_sum_grid;  // 6 pairings in Table 7 column order

  std::vector<Table> tables() const;
};

namespace detail {

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

inline std::string fnv1a64_hex(std::string_view data) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

inline Cell cell_of(const std::optional<double>& v) {
  return v ? Cell::of_real(*v) : Cell::none();
}

}  // namespace detail

inline AnalysisRun run_analysis(const Corpus& raw, const EngineConfig& config) {
  config.validate();
  AnalysisRun run;
  run.config = config;

  const Corpus corpus = apply_stability_filter(raw);
  run.researcher_count = corpus.researchers.size();
  run.publication_count = corpus.publications.size();

  const std::vector<int> eligible =
      select_eligible_sds(corpus, config.min_publishing_fraction, &run.warnings);
  for (int sds : eligible) run.eligible_sds.push_back(corpus.sds[sds].id);

  const BaselineTable baselines = build_baselines(corpus);
  run.metrics = researcher_metrics(corpus, baselines);
  run.percent_ranks = compute_percent_ranks(corpus, run.metrics, eligible);

  run.regression_total = run_regression_analysis(
      corpus, run.metrics, eligible, RegressionMode::total_citations, &run.warnings);
  run.regression_best = run_regression_analysis(
      corpus, run.metrics, eligible, RegressionMode::best_publication, &run.warnings);

  const auto parts_p = build_sds_partitions(corpus, run.metrics, eligible,
                                            SelectionMode::by_p,
                                            config.top_fraction, &run.warnings);
  const auto parts_fp = build_sds_partitions(corpus, run.metrics, eligible,
                                             SelectionMode::by_fp,
                                             config.top_fraction, nullptr);

  run.all_pubs_by_p = run_top_vs_rest(corpus, run.percent_ranks, parts_p,
                                      QualityScope::all_publications,
                                      SelectionMode::by_p);
  run.all_pubs_by_fp = run_top_vs_rest(corpus, run.percent_ranks, parts_fp,
                                       QualityScope::all_publications,
                                       SelectionMode::by_fp);
  run.best_pub_by_p = run_top_vs_rest(corpus, run.percent_ranks, parts_p,
                                      QualityScope::best_publication,
                                      SelectionMode::by_p);
  run.best_pub_by_fp = run_top_vs_rest(corpus, run.percent_ranks, parts_fp,
                                       QualityScope::best_publication,
                                       SelectionMode::by_fp);

  if (config.intersection_mode) {
    const auto parts_both = build_sds_partitions(
        corpus, run.metrics, eligible, SelectionMode::intersection,
        config.top_fraction, &run.warnings);
    run.configured_all_pubs =
        run_top_vs_rest(corpus, run.percent_ranks, parts_both,
                        QualityScope::all_publications, SelectionMode::intersection);
  } else {
    run.configured_all_pubs =
        config.productivity_indicator == ProductivityIndicator::P
            ? run.all_pubs_by_p
            : run.all_pubs_by_fp;
  }

  // Table 7 column order: P x (perc, ave, if), then FP x (perc, ave, if)
  const std::array<QualityIndicator, 3> quality_order = {
      QualityIndicator::QiCPerc, QualityIndicator::QiCAve, QualityIndicator::QiIf};
  for (QualityIndicator q : quality_order) {
    run.rank_sum_grid.push_back(run_rank_sum_analysis(
        corpus, run.metrics, parts_p, q, SelectionMode::by_p, &run.warnings));
  }
  for (QualityIndicator q : quality_order) {
    run.rank_sum_grid.push_back(run_rank_sum_analysis(
        corpus, run.metrics, parts_fp, q, SelectionMode::by_fp, nullptr));
  }
  return run;
}

// Loads the corpus from `dir`, records input checksums, and runs the full
// analysis.
inline AnalysisRun analyze_directory(const std::filesystem::path& dir,
                                     const EngineConfig& config) {
  static constexpr const char* kInputFiles[] = {
      "classification.csv", "journals.csv",    "pub_authors.csv",
      "pub_categories.csv", "publications.csv", "researchers.csv"};
  const Corpus corpus = load_corpus(dir, config);
  AnalysisRun run = run_analysis(corpus, config);
  for (const char* name : kInputFiles) {
    run.input_checksums.emplace_back(
        name, detail::fnv1a64_hex(csv::detail::read_whole_file(dir / name)));
  }
  return run;
}

inline std::vector<Table> AnalysisRun::tables() const {
  std::vector<Table> tables;

  auto regression_table = [](const RegressionTable& reg, std::string name) {
    Table t;
    t.name = std::move(name);
    t.columns = {"UDA", "Obs", "Correlation", "gamma", "stars", "robust_se", "adj_R2"};
    for (const RegressionRow& row : reg.rows) {
      std::vector<Cell> cells;
      cells.push_back(Cell::of_text(row.uda));
      cells.push_back(Cell::of_int(row.n_obs));
      if (row.result) {
        cells.push_back(Cell::of_real(row.result->pearson_log));
        cells.push_back(Cell::of_real(row.result->gamma));
        cells.push_back(Cell::of_text(std::string(stats::to_string(row.result->stars))));
        cells.push_back(Cell::of_real(row.result->robust_se));
        cells.push_back(Cell::of_real(row.result->adj_r2));
      } else {
        cells.push_back(Cell::none());
        cells.push_back(Cell::none());
        cells.push_back(Cell::of_text(row.note));
        cells.push_back(Cell::none());
        cells.push_back(Cell::none());
      }
      t.rows.push_back(std::move(cells));
    }
    return t;
  };
  tables.push_back(regression_table(regression_total, "table1_regression_total"));

  {
    Table t;
    t.name = "table2_mean_diff_overall";
    t.columns = {"Productivity", "QI_c_ave", "QI_c_perc", "QI_if"};
    for (const ComparisonResult* cmp : {&all_pubs_by_p, &all_pubs_by_fp}) {
      t.rows.push_back({Cell::of_text(to_string(cmp->selection)),
                        detail::cell_of(cmp->overall.qi_c_ave),
                        detail::cell_of(cmp->overall.qi_c_perc),
                        detail::cell_of(cmp->overall.qi_if)});
    }
    tables.push_back(std::move(t));
  }

  {
    Table t;
    t.name = "table3_mean_diff_uda";
    t.columns = {"UDA", "QI_c_ave", "QI_c_perc", "QI_if"};
    for (const auto& [uda, cells] : configured_all_pubs.by_uda) {
      t.rows.push_back({Cell::of_text(uda), detail::cell_of(cells.qi_c_ave),
                        detail::cell_of(cells.qi_c_perc),
                        detail::cell_of(cells.qi_if)});
    }
    tables.push_back(std::move(t));
  }

  {
    Table t;
    t.name = "table4_sds_counts";
    t.columns = {"UDA", "Total_SDS", "QI_c_ave", "QI_c_perc", "QI_if"};
    for (const SdsCountRow& row : configured_all_pubs.sds_counts) {
      t.rows.push_back({Cell::of_text(row.uda), Cell::of_int(row.sds_total),
                        Cell::of_int(row.qi_c_ave), Cell::of_int(row.qi_c_perc),
                        Cell::of_int(row.qi_if)});
    }
    tables.push_back(std::move(t));
  }

  tables.push_back(regression_table(regression_best, "table5_regression_best"));

  {
    Table t;
    t.name = "table6_mean_diff_best";
    t.columns = {"Productivity", "QI_c_ave", "QI_c_perc", "QI_if"};
    for (const ComparisonResult* cmp : {&best_pub_by_p, &best_pub_by_fp}) {
      t.rows.push_back({Cell::of_text(to_string(cmp->selection)),
                        detail::cell_of(cmp->overall.qi_c_ave),
                        detail::cell_of(cmp->overall.qi_c_perc),
                        detail::cell_of(cmp->overall.qi_if)});
    }
    tables.push_back(std::move(t));
  }

  {
    Table t;
    t.name = "table7_rank_sum_counts";
    t.columns = {"UDA",          "Total_SDS",    "P-QI_c_perc",
                 "P-QI_c_ave",   "P-QI_if",      "FP-QI_c_perc",
                 "FP-QI_c_ave",  "FP-QI_if"};
    // UDA universe and SDS totals come from the P-selection comparison
    std::map<std::string, std::array<std::optional<int>, 6>> grid;
    std::map<std::string, int> totals;
    for (const SdsCountRow& row : all_pubs_by_p.sds_counts) {
      if (row.uda == "Total") continue;
      totals[row.uda] = row.sds_total;
      grid[row.uda];
    }
    for (std::size_t col = 0; col < rank_sum_grid.size(); ++col) {
      for (const auto& [uda, count] : rank_sum_grid[col].counts_by_uda) {
        if (uda == "Total") continue;
        grid[uda][col] = count;
      }
    }
    std::array<int, 6> column_totals{};
    int total_sds = 0;
    for (const auto& [uda, cols] : grid) {
      std::vector<Cell> cells;
      cells.push_back(Cell::of_text(uda));
      cells.push_back(Cell::of_int(totals.count(uda) ? totals[uda] : 0));
      total_sds += totals.count(uda) ? totals[uda] : 0;
      for (std::size_t col = 0; col < 6; ++col) {
        const int v = cols[col].value_or(0);
        cells.push_back(Cell::of_int(v));
        column_totals[col] += v;
      }
      t.rows.push_back(std::move(cells));
    }
    std::vector<Cell> total_row;
    total_row.push_back(Cell::of_text("Total"));
    total_row.push_back(Cell::of_int(total_sds));
    for (int v : column_totals) total_row.push_back(Cell::of_int(v));
    t.rows.push_back(std::move(total_row));
    tables.push_back(std::move(t));
  }

  return tables;
}

// ---------------------------------------------------------------------------
// report bundle

enum class BundleFormat { csv, markdown, both };

inline nlohmann::json write_report_bundle(const AnalysisRun& run,
                                          const std::filesystem::path& dir,
                                          BundleFormat format = BundleFormat::both) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) {
    throw DataError("cannot create output directory: " + dir.string());
  }

  const std::vector<Table> tables = run.tables();
  const int precision = run.config.output_precision;

  nlohmann::json table_rows = nlohmann::json::object();
  auto write_file = [&dir](const std::string& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + (dir / name).string());
    out << content;
  };

  nlohmann::json run_tables = nlohmann::json::array();
  for (const Table& table : tables) {
    if (format != BundleFormat::markdown) {
      write_file(table.name + ".csv", render_table(table, TableFormat::csv, precision));
    }
    if (format != BundleFormat::csv) {
      write_file(table.name + ".md", render_table(table, TableFormat::markdown, precision));
    }
    table_rows[table.name] = table.rows.size();
    run_tables.push_back(table_to_json(table));
  }

  nlohmann::json inputs = nlohmann::json::object();
  for (const auto& [file, checksum] : run.input_checksums) inputs[file] = checksum;

  nlohmann::json manifest{
      {"engine_version", kEngineVersion},
      {"config", run.config.to_json()},
      {"inputs", inputs},
      {"corpus",
       {{"researchers", run.researcher_count},
        {"publications", run.publication_count},
        {"eligible_sds", run.eligible_sds.size()}}},
      {"tables", table_rows},
      {"warnings", run.warnings},
  };
  write_file("manifest.json", manifest.dump(2) + "\n");

  nlohmann::json document{
      {"engine_version", kEngineVersion},
      {"config", run.config.to_json()},
      {"inputs", inputs},
      {"eligible_sds", run.eligible_sds},
      {"warnings", run.warnings},
      {"tables", run_tables},
  };
  write_file("analysis_run.json", document.dump(2) + "\n");
  return manifest;
}

// Re-renders the table files of a persisted run document
// (analysis_run.json) into `dir`.
inline void render_run_document(const std::filesystem::path& document_path,
                                const std::filesystem::path& dir,
                                BundleFormat format,
                                std::optional<int> precision_override = std::nullopt) {
  std::ifstream in(document_path);
  if (!in) {
    throw DataError("missing or unreadable run document: " + document_path.string());
  }
  nlohmann::json document;
  try {
    in >> document;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(document_path.string() + ": invalid JSON: " + e.what());
  }
  int precision = 3;
  try {
    precision = document.at("config").value("output_precision", 3);
  } catch (const nlohmann::json::exception&) {
  }
  if (precision_override) precision = *precision_override;

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!document.contains("tables") || !document["tables"].is_array()) {
    throw DataError(document_path.string() + ": no tables array");
  }
  for (const auto& jtable : document["tables"]) {
    const Table table = table_from_json(jtable);
    auto write_file = [&dir](const std::string& name, const std::string& content) {
      std::ofstream out(dir / name, std::ios::binary);
      if (!out) throw DataError("cannot write file: " + (dir / name).string());
      out << content;
    };
    if (format != BundleFormat::markdown) {
      write_file(table.name + ".csv", render_table(table, TableFormat::csv, precision));
    }
    if (format != BundleFormat::csv) {
      write_file(table.name + ".md", render_table(table, TableFormat::markdown, precision));
    }
  }
}

}  // namespace scieval
