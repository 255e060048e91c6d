#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <set>

#include "scieval/pipeline.hpp"
#include "scieval/synth.hpp"
#include "helpers.hpp"

using namespace scieval;
using Catch::Matchers::WithinAbs;
using testutil::CorpusFixture;
using testutil::TempDir;

namespace {

Corpus synth_corpus(TempDir& dir, const synth::SynthParams& params,
                    const EngineConfig& config = {}) {
  synth::gen_synthetic_corpus(params).write_to(dir.path());
  return load_corpus(dir.path(), config);
}

}  // namespace

TEST_CASE("regression analysis recovers the generator gamma per UDA") {
  TempDir dir;
  synth::SynthParams params;
  params.researcher_count = 4000;  // ~2000 per UDA
  params.sds_count = 8;
  params.uda_count = 2;
  params.coupling = synth::Coupling::coupled;
  params.true_gamma = 1.25;
  // high, tightly dispersed per-publication citation counts keep the
  // log-scale noise dominated by the homoskedastic researcher factor
  params.citation_mean = 50.0;
  params.citation_dispersion = 100.0;
  params.seed = 404;
  const Corpus corpus = synth_corpus(dir, params);
  const auto baselines = build_baselines(corpus);
  const auto metrics = researcher_metrics(corpus, baselines);
  const auto eligible = select_eligible_sds(corpus);

  const auto table = run_regression_analysis(corpus, metrics, eligible,
                                             RegressionMode::total_citations);
  REQUIRE(table.rows.size() == 3);  // 2 UDA + Total
  CHECK(table.rows.back().uda == "Total");
  for (const auto& row : table.rows) {
    REQUIRE(row.result.has_value());
    CHECK(row.n_obs > 1000);
    CHECK(std::fabs(row.result->gamma - 1.25) <= 3.0 * row.result->robust_se);
    CHECK(row.result->stars == stats::Stars::three);
  }
}

TEST_CASE("regression: identical P for every researcher flags a degenerate design") {
  TempDir dir;
  CorpusFixture f;
  f.sds("S1", "U1");
  for (int i = 0; i < 6; ++i) {
    const std::string r = "R" + std::to_string(i);
    const std::string p = "P" + std::to_string(i);
    f.researcher(r, "S1");
    f.publication(p, 2002, i + 1, "", 1).category(p, "C1").author(p, r);
  }
  const Corpus corpus = f.load(dir.path());
  const auto baselines = build_baselines(corpus);
  const auto metrics = researcher_metrics(corpus, baselines);
  const auto eligible = select_eligible_sds(corpus);

  std::vector<std::string> warnings;
  const auto table = run_regression_analysis(corpus, metrics, eligible,
                                             RegressionMode::total_citations, &warnings);
  for (const auto& row : table.rows) {
    CHECK_FALSE(row.result.has_value());
    CHECK(row.note == "degenerate-design");
  }
  CHECK_FALSE(warnings.empty());
}

TEST_CASE("regression: single-publication researchers make both modes identical") {
  TempDir dir;
  synth::SynthParams params;
  params.researcher_count = 300;
  params.sds_count = 3;
  params.uda_count = 1;
  params.productivity_mu = -10.0;  // floor(exp(...)) = 0 -> P = 1 for everyone
  params.productivity_sigma = 0.0;
  params.seed = 5;
  const Corpus corpus = synth_corpus(dir, params);
  const auto baselines = build_baselines(corpus);
  const auto metrics = researcher_metrics(corpus, baselines);
  for (const auto& m : metrics) CHECK(m.publication_count == 1);
  const auto eligible = select_eligible_sds(corpus);

  // P is constant, so the design is degenerate in both modes, flagged the
  // same way; the mode equivalence max = sum is checked on the metrics
  for (const auto& m : metrics) {
    if (m.publication_count == 1) {
      CHECK(m.total_normalized_citations == *m.best_qi_c_ave);
    }
  }
  const auto total = run_regression_analysis(corpus, metrics, eligible,
                                             RegressionMode::total_citations);
  const auto best = run_regression_analysis(corpus, metrics, eligible,
                                            RegressionMode::best_publication);
  REQUIRE(total.rows.size() == best.rows.size());
  for (std::size_t i = 0; i < total.rows.size(); ++i) {
    CHECK(total.rows[i].n_obs == best.rows[i].n_obs);
    CHECK(total.rows[i].note == best.rows[i].note);
  }
}

TEST_CASE("regression: insufficient data rows are flagged, not fatal") {
  TempDir dir;
  CorpusFixture f;
  f.sds("S1", "U1").researcher("R1", "S1").researcher("R2", "S1");
  f.publication("P1", 2002, 3, "", 1).category("P1", "C1").author("P1", "R1");
  f.publication("P2", 2002, 5, "", 1).category("P2", "C1").author("P2", "R2");
  const Corpus corpus = f.load(dir.path());
  const auto baselines = build_baselines(corpus);
  const auto metrics = researcher_metrics(corpus, baselines);
  const auto table = run_regression_analysis(corpus, metrics, select_eligible_sds(corpus),
                                             RegressionMode::total_citations);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0].note == "insufficient-data");
  CHECK(table.rows[0].n_obs == 2);
}

TEST_CASE("top-vs-rest: coupled corpus gives positive differences everywhere") {
  TempDir dir;
  synth::SynthParams params;
  params.researcher_count = 1500;
  params.sds_count = 6;
  params.uda_count = 2;
  params.coupling = synth::Coupling::coupled;
  params.true_gamma = 1.4;
  params.seed = 21;
  const Corpus corpus = synth_corpus(dir, params);
  const auto baselines = build_baselines(corpus);
  const auto metrics = researcher_metrics(corpus, baselines);
  const auto eligible = select_eligible_sds(corpus);
  const auto ranks = compute_percent_ranks(corpus, metrics, eligible);
  const auto parts = build_sds_partitions(corpus, metrics, eligible,
                                          SelectionMode::by_p, 0.10);

  for (QualityScope scope :
       {QualityScope::all_publications, QualityScope::best_publication}) {
    const auto cmp = run_top_vs_rest(corpus, ranks, parts, scope, SelectionMode::by_p);
    REQUIRE(cmp.overall.qi_c_ave.has_value());
    REQUIRE(cmp.overall.qi_c_perc.has_value());
    REQUIRE(cmp.overall.qi_if.has_value());
    CHECK(*cmp.overall.qi_c_ave > 0.0);
    CHECK(*cmp.overall.qi_c_perc > 0.0);
    CHECK(*cmp.overall.qi_if > 0.0);

    // by-UDA rows end with a Total row equal to the researcher-pooled overall
    REQUIRE(cmp.by_uda.size() == 3);
    CHECK(cmp.by_uda.back().first == "Total");
    CHECK(cmp.by_uda.back().second.qi_c_ave == cmp.overall.qi_c_ave);

    // SDS counts bounded by the number of eligible SDS per UDA
    int sds_total = 0;
    for (const auto& row : cmp.sds_counts) {
      if (row.uda == "Total") continue;
      CHECK(row.qi_c_ave <= row.sds_total);
      CHECK(row.qi_c_perc <= row.sds_total);
      CHECK(row.qi_if <= row.sds_total);
      sds_total += row.sds_total;
    }
    CHECK(sds_total == static_cast<int>(parts.size()));
  }
}

TEST_CASE("top-vs-rest: researcher-pooled overall equals the weighted per-SDS combination") {
  TempDir dir;
  synth::SynthParams params;
  params.researcher_count = 600;
  params.sds_count = 5;
  params.uda_count = 2;
  params.seed = 1234;
  const Corpus corpus = synth_corpus(dir, params);
  const auto baselines = build_baselines(corpus);
  const auto metrics = researcher_metrics(corpus, baselines);
  const auto eligible = select_eligible_sds(corpus);
  const auto ranks = compute_percent_ranks(corpus, metrics, eligible);
  const auto parts = build_sds_partitions(corpus, metrics, eligible,
                                          SelectionMode::by_p, 0.10);
  const auto cmp = run_top_vs_rest(corpus, ranks, parts,
                                   QualityScope::all_publications, SelectionMode::by_p);

  // recombine per-SDS sums by hand for qi_c_ave
  double top_sum = 0.0, rest_sum = 0.0;
  std::size_t top_n = 0, rest_n = 0;
  for (const auto& part : parts) {
    for (std::size_t k : part.top) {
      if (auto r = ranks.rank(part.population[k], RankedIndicator::mean_qi_c_ave)) {
        top_sum += *r;
        ++top_n;
      }
    }
    for (std::size_t k : part.rest) {
      if (auto r = ranks.rank(part.population[k], RankedIndicator::mean_qi_c_ave)) {
        rest_sum += *r;
        ++rest_n;
      }
    }
  }
  REQUIRE(cmp.overall.qi_c_ave.has_value());
  CHECK_THAT(*cmp.overall.qi_c_ave,
             WithinAbs(top_sum / top_n - rest_sum / rest_n, 1e-9));
}

TEST_CASE("top-vs-rest: single-SDS forced outcome and empty-rest skip") {
  SECTION("one top scientist holding the best quality gives count 1 of 1") {
    TempDir dir;
    CorpusFixture f;
    f.sds("S1", "U1");
    // 10 researchers; R0 has 3 pubs (top by P), everyone else 1
    int pub = 0;
    auto add = [&](const std::string& r, int cits) {
      const std::string id = "P" + std::to_string(++pub);
      f.publication(id, 2002, cits, "", 1).category(id, "C1").author(id, r);
    };
    for (int i = 0; i < 10; ++i) f.researcher("R" + std::to_string(i), "S1");
    add("R0", 50);
    add("R0", 40);
    add("R0", 60);
    for (int i = 1; i < 10; ++i) add("R" + std::to_string(i), i);
    const Corpus corpus = f.load(dir.path());
    const auto baselines = build_baselines(corpus);
    const auto metrics = researcher_metrics(corpus, baselines);
    const auto eligible = select_eligible_sds(corpus);
    const auto ranks = compute_percent_ranks(corpus, metrics, eligible);
    const auto parts = build_sds_partitions(corpus, metrics, eligible,
                                            SelectionMode::by_p, 0.10);
    REQUIRE(parts.size() == 1);
    CHECK(parts[0].top.size() == 1);

    const auto cmp = run_top_vs_rest(corpus, ranks, parts,
                                     QualityScope::all_publications,
                                     SelectionMode::by_p);
    REQUIRE(cmp.sds_counts.size() == 2);
    CHECK(cmp.sds_counts[0].sds_total == 1);
    CHECK(cmp.sds_counts[0].qi_c_ave == 1);
    CHECK(cmp.sds_counts[0].qi_c_perc == 1);
  }

  SECTION("an SDS whose rest group would be empty is skipped with a warning") {
    TempDir dir;
    CorpusFixture f;
    f.sds("S1", "U1").researcher("R1", "S1");
    f.publication("P1", 2002, 1, "", 1).category("P1", "C1").author("P1", "R1");
    const Corpus corpus = f.load(dir.path());
    const auto baselines = build_baselines(corpus);
    const auto metrics = researcher_metrics(corpus, baselines);
    std::vector<std::string> warnings;
    const auto parts = build_sds_partitions(corpus, metrics, select_eligible_sds(corpus),
                                            SelectionMode::by_p, 0.10, &warnings);
    CHECK(parts.empty());
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("empty rest group") != std::string::npos);
  }
}

TEST_CASE("rank-sum analysis counts SDS where the verdict favors the rest") {
  SECTION("top scientists holding every best-publication maximum give zero counts") {
    TempDir dir;
    synth::SynthParams params;
    params.researcher_count = 400;
    params.sds_count = 4;
    params.uda_count = 2;
    params.coupling = synth::Coupling::coupled;
    params.true_gamma = 2.0;  // strong coupling: top productivity dominates
    params.citation_mean = 20.0;
    params.citation_dispersion = 50.0;
    params.researcher_quality_sigma = 0.1;
    params.seed = 17;
    const Corpus corpus = synth_corpus(dir, params);
    const auto baselines = build_baselines(corpus);
    const auto metrics = researcher_metrics(corpus, baselines);
    const auto eligible = select_eligible_sds(corpus);
    const auto parts = build_sds_partitions(corpus, metrics, eligible,
                                            SelectionMode::by_p, 0.10);
    const auto analysis = run_rank_sum_analysis(corpus, metrics, parts,
                                                QualityIndicator::QiCAve,
                                                SelectionMode::by_p);
    REQUIRE(analysis.counts_by_uda.back().first == "Total");
    CHECK(analysis.counts_by_uda.back().second == 0);
  }

  SECTION("hand-built 5-researcher SDS matches the brute-force verdict") {
    TempDir dir;
    CorpusFixture f;
    f.sds("S1", "U1");
    // R0 is top by P (2 pubs); best qualities put R0 in the middle
    const int citations[5][2] = {{3, 2}, {9, -1}, {1, -1}, {7, -1}, {5, -1}};
    int pub = 0;
    for (int i = 0; i < 5; ++i) {
      const std::string r = "R" + std::to_string(i);
      f.researcher(r, "S1");
      for (int k = 0; k < 2; ++k) {
        if (citations[i][k] < 0) continue;
        const std::string id = "P" + std::to_string(++pub);
        f.publication(id, 2002, citations[i][k], "", 1).category(id, "C1").author(id, r);
      }
    }
    const Corpus corpus = f.load(dir.path());
    const auto baselines = build_baselines(corpus);
    const auto metrics = researcher_metrics(corpus, baselines);
    const auto eligible = select_eligible_sds(corpus);
    const auto parts = build_sds_partitions(corpus, metrics, eligible,
                                            SelectionMode::by_p, 0.10);
    REQUIRE(parts.size() == 1);
    REQUIRE(parts[0].top.size() == 1);

    const auto analysis = run_rank_sum_analysis(corpus, metrics, parts,
                                                QualityIndicator::QiCAve,
                                                SelectionMode::by_p);
    REQUIRE(analysis.sds_verdicts.size() == 1);

    // oracle: best qi_c_ave values; R0's best is 3/mean, others 9,1,7,5 over mean
    std::vector<double> best{3, 9, 1, 7, 5};
    std::vector<bool> is_top{true, false, false, false, false};
    const auto oracle = testutil::rank_sum_oracle(best, is_top);
    const auto verdict = analysis.sds_verdicts[0].second;
    if (oracle.verdict > 0) CHECK(verdict == stats::RankVerdict::top);
    if (oracle.verdict < 0) CHECK(verdict == stats::RankVerdict::others);
    if (oracle.verdict == 0) CHECK(verdict == stats::RankVerdict::tie);
  }
}

TEST_CASE("full run produces the seven tables with the documented shapes") {
  TempDir dir;
  synth::SynthParams params;
  params.researcher_count = 500;
  params.sds_count = 6;
  params.uda_count = 3;
  params.seed = 99;
  const Corpus corpus = synth_corpus(dir, params);

  EngineConfig config;
  const AnalysisRun run = run_analysis(corpus, config);
  const auto tables = run.tables();
  REQUIRE(tables.size() == 7);

  CHECK(tables[0].name == "table1_regression_total");
  CHECK(tables[0].columns ==
        std::vector<std::string>{"UDA", "Obs", "Correlation", "gamma", "stars",
                                 "robust_se", "adj_R2"});
  CHECK(tables[1].name == "table2_mean_diff_overall");
  CHECK(tables[1].rows.size() == 2);  // P and FP
  CHECK(tables[2].name == "table3_mean_diff_uda");
  CHECK(tables[3].name == "table4_sds_counts");
  CHECK(tables[4].name == "table5_regression_best");
  CHECK(tables[5].name == "table6_mean_diff_best");
  CHECK(tables[6].name == "table7_rank_sum_counts");
  CHECK(tables[6].columns ==
        std::vector<std::string>{"UDA", "Total_SDS", "P-QI_c_perc", "P-QI_c_ave",
                                 "P-QI_if", "FP-QI_c_perc", "FP-QI_c_ave",
                                 "FP-QI_if"});

  SECTION("Total regression row equals the pooled regression, not a row average") {
    const auto baselines = build_baselines(apply_stability_filter(corpus));
    // the fixture has no mobile researchers, so the filtered corpus matches
    const auto metrics = researcher_metrics(corpus, baselines);
    std::vector<std::pair<double, double>> pooled;
    std::vector<char> eligible_sds(corpus.sds.size(), 0);
    for (int s : select_eligible_sds(corpus)) eligible_sds[s] = 1;
    for (std::size_t i = 0; i < corpus.researchers.size(); ++i) {
      if (!eligible_sds[corpus.researchers[i].sds]) continue;
      const auto& m = metrics[i];
      if (m.publication_count >= 1 && m.total_normalized_citations > 0.0) {
        pooled.emplace_back(m.publication_count, m.total_normalized_citations);
      }
    }
    const auto expected = stats::ols_loglog(pooled);
    const auto& total_row = run.regression_total.rows.back();
    REQUIRE(total_row.uda == "Total");
    REQUIRE(total_row.result.has_value());
    CHECK_THAT(total_row.result->gamma, WithinAbs(expected.gamma, 1e-12));
    CHECK(total_row.n_obs == static_cast<int>(pooled.size()));
  }
}

TEST_CASE("render_table emits the documented formats deterministically") {
  Table t;
  t.name = "demo";
  t.columns = {"UDA", "Obs", "gamma"};
  t.rows.push_back({Cell::of_text("U1"), Cell::of_int(12), Cell::of_real(1.23456)});
  t.rows.push_back({Cell::of_text("Total"), Cell::of_int(40), Cell::none()});

  const std::string csv_text = render_table(t, TableFormat::csv, 3);
  CHECK(csv_text == "UDA,Obs,gamma\nU1,12,1.235\nTotal,40,\n");

  const std::string md = render_table(t, TableFormat::markdown, 3);
  CHECK(md ==
        "| UDA | Obs | gamma |\n"
        "| --- | --- | --- |\n"
        "| U1 | 12 | 1.235 |\n"
        "| Total | 40 |  |\n");

  CHECK(render_table(t, TableFormat::csv, 3) == csv_text);  // stable

  // precision is honored
  CHECK(render_table(t, TableFormat::csv, 1).find("1.2\n") != std::string::npos);
}

TEST_CASE("report bundle: file inventory, determinism, provenance") {
  TempDir corpus_dir;
  synth::SynthParams params;
  params.researcher_count = 300;
  params.sds_count = 4;
  params.uda_count = 2;
  params.seed = 7;
  synth::gen_synthetic_corpus(params).write_to(corpus_dir.path());

  EngineConfig config;
  config.seed = 42;
  const AnalysisRun run = analyze_directory(corpus_dir.path(), config);

  TempDir out1, out2;
  const auto manifest1 = write_report_bundle(run, out1.path());
  const auto manifest2 = write_report_bundle(run, out2.path());

  const std::vector<std::string> expected_tables{
      "table1_regression_total", "table2_mean_diff_overall",
      "table3_mean_diff_uda",    "table4_sds_counts",
      "table5_regression_best",  "table6_mean_diff_best",
      "table7_rank_sum_counts"};
  for (const auto& name : expected_tables) {
    CHECK(std::filesystem::exists(out1.path() / (name + ".csv")));
    CHECK(std::filesystem::exists(out1.path() / (name + ".md")));
  }
  CHECK(std::filesystem::exists(out1.path() / "manifest.json"));
  CHECK(std::filesystem::exists(out1.path() / "analysis_run.json"));

  // byte-identical across reruns
  for (const auto& entry : std::filesystem::directory_iterator(out1.path())) {
    const auto name = entry.path().filename();
    CHECK(testutil::read_file(entry.path()) == testutil::read_file(out2.path() / name));
  }
  CHECK(manifest1 == manifest2);
  CHECK(manifest1.at("config").at("seed") == 42);
  CHECK(manifest1.at("inputs").size() == 6);

  SECTION("a different seed shows up in the manifest provenance") {
    EngineConfig reseeded = config;
    reseeded.seed = 43;
    const AnalysisRun run2 = analyze_directory(corpus_dir.path(), reseeded);
    TempDir out3;
    const auto manifest3 = write_report_bundle(run2, out3.path());
    CHECK(manifest3.at("config").at("seed") == 43);
    CHECK(manifest1.at("inputs") == manifest3.at("inputs"));
  }

  SECTION("render_run_document reproduces the table files") {
    TempDir rerender;
    render_run_document(out1.path() / "analysis_run.json", rerender.path(),
                        BundleFormat::csv);
    for (const auto& name : expected_tables) {
      CHECK(testutil::read_file(rerender.path() / (name + ".csv")) ==
            testutil::read_file(out1.path() / (name + ".csv")));
    }
  }
}

TEST_CASE("intersection mode restricts the configured top group") {
  TempDir dir;
  synth::SynthParams params;
  params.researcher_count = 400;
  params.sds_count = 4;
  params.uda_count = 2;
  params.coauthor_lambda = 3.0;  // makes P and FP orders diverge
  params.seed = 55;
  const Corpus corpus = synth_corpus(dir, params);

  EngineConfig config;
  config.intersection_mode = true;
  const AnalysisRun run = run_analysis(corpus, config);
  // the configured comparison used the intersection selection
  CHECK(run.configured_all_pubs.selection == SelectionMode::intersection);

  const auto baselines = build_baselines(apply_stability_filter(corpus));
  const auto metrics = researcher_metrics(corpus, baselines);
  const auto eligible = select_eligible_sds(corpus);
  const auto parts_p = build_sds_partitions(corpus, metrics, eligible,
                                            SelectionMode::by_p, 0.10);
  const auto parts_both = build_sds_partitions(corpus, metrics, eligible,
                                               SelectionMode::intersection, 0.10);
  // intersection tops are subsets of the P tops, SDS by SDS
  for (const auto& bp : parts_both) {
    for (const auto& pp : parts_p) {
      if (pp.sds != bp.sds) continue;
      std::set<int> p_top;
      for (auto k : pp.top) p_top.insert(pp.population[k]);
      for (auto k : bp.top) CHECK(p_top.count(bp.population[k]) == 1);
    }
  }
}
