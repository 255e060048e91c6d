#pragma once

// Shared test fixtures and independent oracles. The oracles deliberately
// take different computational routes than the library (linear scans,
// centered closed-form algebra, exhaustive enumeration) so the two sides
// can validate each other.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "scieval/config.hpp"
#include "scieval/corpus.hpp"

namespace testutil {

class TempDir {
 public:
  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "scieval_test_XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) {
      throw std::runtime_error("mkdtemp failed");
    }
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

// ---------------------------------------------------------------------------
// corpus fixture builder: accumulates rows, writes the six CSV files

struct CorpusFixture {
  std::vector<std::string> classification;  // sds,uda,name
  std::vector<std::string> researchers;     // id,sds,cu,cs,en,le
  std::vector<std::string> publications;    // id,year,cits,journal,total_authors
  std::vector<std::string> pub_categories;  // pub,cat
  std::vector<std::string> pub_authors;     // pub,researcher
  std::vector<std::string> journals;        // journal,year,cat,if

  CorpusFixture& sds(const std::string& id, const std::string& uda,
                     const std::string& name = "sector") {
    classification.push_back(id + "," + uda + "," + name);
    return *this;
  }
  CorpusFixture& researcher(const std::string& id, const std::string& sds,
                            bool cu = false, bool cs = false, bool en = false,
                            bool le = false) {
    researchers.push_back(id + "," + sds + "," + (cu ? "1" : "0") + "," +
                          (cs ? "1" : "0") + "," + (en ? "1" : "0") + "," +
                          (le ? "1" : "0"));
    return *this;
  }
  CorpusFixture& publication(const std::string& id, int year, int citations,
                             const std::string& journal, int total_authors) {
    publications.push_back(id + "," + std::to_string(year) + "," +
                           std::to_string(citations) + "," + journal + "," +
                           std::to_string(total_authors));
    return *this;
  }
  CorpusFixture& category(const std::string& pub, const std::string& cat) {
    pub_categories.push_back(pub + "," + cat);
    return *this;
  }
  CorpusFixture& author(const std::string& pub, const std::string& researcher) {
    pub_authors.push_back(pub + "," + researcher);
    return *this;
  }
  CorpusFixture& journal(const std::string& id, int year, const std::string& cat,
                         double impact) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", impact);
    journals.push_back(id + "," + std::to_string(year) + "," + cat + "," + buf);
    return *this;
  }

  void write_to(const std::filesystem::path& dir) const {
    auto emit = [&dir](const char* name, const std::string& header,
                       const std::vector<std::string>& rows) {
      std::string content = header + "\n";
      for (const std::string& row : rows) content += row + "\n";
      write_file(dir / name, content);
    };
    emit("classification.csv", "sds_id,uda_id,sds_name", classification);
    emit("researchers.csv",
         "researcher_id,sds_id,changed_university,changed_sds,entered,left",
         researchers);
    emit("publications.csv", "pub_id,year,citation_count,journal_id,total_author_count",
         publications);
    emit("pub_categories.csv", "pub_id,category_id", pub_categories);
    emit("pub_authors.csv", "pub_id,researcher_id", pub_authors);
    emit("journals.csv", "journal_id,year,category_id,impact_factor", journals);
  }

  scieval::Corpus load(const std::filesystem::path& dir,
                       scieval::EngineConfig config = {}) const {
    write_to(dir);
    return scieval::load_corpus(dir, config);
  }
};

// A small well-formed corpus: 2 SDS in 2 UDA, 4 researchers, 5 publications.
inline CorpusFixture small_fixture() {
  CorpusFixture f;
  f.sds("S1", "U1", "alpha").sds("S2", "U2", "beta");
  f.researcher("R1", "S1").researcher("R2", "S1").researcher("R3", "S2").researcher("R4", "S2");
  f.publication("P1", 2001, 4, "J1", 2)
      .publication("P2", 2002, 0, "J1", 1)
      .publication("P3", 2002, 9, "J2", 3)
      .publication("P4", 2003, 2, "", 1)
      .publication("P5", 2003, 7, "J2", 2);
  f.category("P1", "C1").category("P2", "C1").category("P3", "C1")
      .category("P3", "C2").category("P4", "C2").category("P5", "C2");
  f.author("P1", "R1").author("P1", "R2").author("P2", "R1")
      .author("P3", "R3").author("P4", "R3").author("P5", "R4");
  f.journal("J1", 2001, "C1", 1.5).journal("J1", 2002, "C1", 1.6)
      .journal("J2", 2002, "C1", 2.5).journal("J2", 2002, "C2", 2.5)
      .journal("J2", 2003, "C2", 2.7);
  return f;
}

// ---------------------------------------------------------------------------
// independent OLS + HC1 oracle (centered closed form, long double)

struct OlsOracle {
  long double gamma = 0, intercept = 0, hc1_se = 0, adj_r2 = 0, pearson = 0;
};

inline OlsOracle ols_oracle(const std::vector<std::pair<double, double>>& pairs) {
  const std::size_t n = pairs.size();
  std::vector<long double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::log(static_cast<long double>(pairs[i].first));
    y[i] = std::log(static_cast<long double>(pairs[i].second));
  }
  long double xb = 0, yb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    xb += x[i];
    yb += y[i];
  }
  xb /= n;
  yb /= n;
  long double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xb) * (x[i] - xb);
    sxy += (x[i] - xb) * (y[i] - yb);
    syy += (y[i] - yb) * (y[i] - yb);
  }
  OlsOracle o;
  o.gamma = sxy / sxx;
  o.intercept = yb - o.gamma * xb;
  long double ssr = 0, meat = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double e = y[i] - (o.intercept + o.gamma * x[i]);
    ssr += e * e;
    meat += e * e * (x[i] - xb) * (x[i] - xb);
  }
  // HC1 slope variance in centered form: n/(n-2) * sum e^2 (x-xb)^2 / sxx^2
  o.hc1_se = std::sqrt(static_cast<long double>(n) / (n - 2) * meat / (sxx * sxx));
  const long double r2 = 1 - ssr / syy;
  o.adj_r2 = 1 - (1 - r2) * (n - 1) / static_cast<long double>(n - 2);
  o.pearson = sxy / std::sqrt(sxx * syy);
  return o;
}

// ---------------------------------------------------------------------------
// exhaustive rank-sum oracle over one group's membership mask

struct RankSumOracle {
  long double top_r_eff = 0, top_r_max = 0, top_r_min = 0;
  int verdict = 0;  // +1 top, -1 others, 0 tie (by comparing group mean ranks)
};

inline RankSumOracle rank_sum_oracle(const std::vector<double>& quality,
                                     const std::vector<bool>& is_top) {
  const std::size_t n = quality.size();
  // midranks by direct pairwise counting
  std::vector<long double> rank(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t less = 0, equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (quality[j] < quality[i]) ++less;
      if (quality[j] == quality[i]) ++equal;
    }
    // tied block occupies positions less+1 .. less+equal
    rank[i] = static_cast<long double>(2 * less + equal + 1) / 2.0L;
  }
  std::size_t g = 0;
  RankSumOracle o;
  long double top_mean = 0, oth_mean = 0;
  std::size_t oth = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_top[i]) {
      o.top_r_eff += rank[i];
      top_mean += rank[i];
      ++g;
    } else {
      oth_mean += rank[i];
      ++oth;
    }
  }
  top_mean /= g;
  oth_mean /= oth;
  // enumerate all position subsets of size g for max/min rank sums
  // (positions are 1..n; max = sum of the g largest, found by brute force)
  std::vector<int> positions(n);
  for (std::size_t i = 0; i < n; ++i) positions[i] = static_cast<int>(i) + 1;
  long double best_max = 0, best_min = 0;
  bool first = true;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != g) continue;
    long double sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) sum += positions[i];
    }
    if (first || sum > best_max) best_max = sum;
    if (first || sum < best_min) best_min = sum;
    first = false;
  }
  o.top_r_max = best_max;
  o.top_r_min = best_min;
  o.verdict = top_mean > oth_mean ? 1 : (top_mean < oth_mean ? -1 : 0);
  return o;
}

}  // namespace testutil
