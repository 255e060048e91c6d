#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "scieval/config.hpp"
#include "scieval/csv.hpp"
#include "scieval/error.hpp"

namespace scieval {

// All cross references are stored as dense indexes into the corpus tables;
// external string keys live in the id tables and are resolved once at load.

struct ResearcherRecord {
  std::string id;
  int sds = -1;  // index into Corpus::sds
  bool changed_university = false;
  bool changed_sds = false;
  bool entered_during_period = false;
  bool left_during_period = false;

  bool mobile() const {
    return changed_university || changed_sds || entered_during_period ||
           left_during_period;
  }
};

struct PublicationRecord {
  std::string id;
  int year = 0;
  int citation_count = 0;
  int journal = -1;  // index into Corpus::journal_ids, -1 when none
  int total_author_count = 0;
  std::vector<int> categories;  // indexes into Corpus::category_ids
  std::vector<int> authors;     // indexes into Corpus::researchers; may drain under filters
};

struct JournalImpactRecord {
  int journal = -1;
  int year = 0;
  int category = -1;
  double impact_factor = 0.0;
};

struct SdsInfo {
  std::string id;
  int uda = -1;  // index into Corpus::uda_ids
  std::string name;
};

struct LoadStats {
  std::size_t researcher_rows = 0;
  std::size_t publication_rows = 0;
  std::size_t category_rows = 0;
  std::size_t authorship_rows = 0;
  std::size_t journal_rows = 0;
  std::size_t classification_rows = 0;
};

class Corpus {
 public:
  int window_start = 0;
  int window_end = 0;

  std::vector<ResearcherRecord> researchers;
  std::vector<PublicationRecord> publications;
  std::vector<JournalImpactRecord> journal_impacts;
  std::vector<SdsInfo> sds;

  std::vector<std::string> uda_ids;
  std::vector<std::string> category_ids;
  std::vector<std::string> journal_ids;

  LoadStats load_stats;

  // Impact factor of (journal, category, year), if a record exists.
  std::optional<double> impact_factor(int journal, int category, int year) const {
    auto it = impact_index_.find(impact_key(journal, category, year));
    if (it == impact_index_.end()) return std::nullopt;
    return it->second;
  }

  void rebuild_impact_index() {
    impact_index_.clear();
    impact_index_.reserve(journal_impacts.size());
    for (const JournalImpactRecord& rec : journal_impacts) {
      impact_index_.emplace(impact_key(rec.journal, rec.category, rec.year),
                            rec.impact_factor);
    }
  }

  static std::uint64_t impact_key(int journal, int category, int year) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(journal)) << 32) ^
           (static_cast<std::uint64_t>(static_cast<std::uint16_t>(category)) << 16) ^
           static_cast<std::uint64_t>(static_cast<std::uint16_t>(year));
  }

 private:
  std::unordered_map<std::uint64_t, double> impact_index_;
};

namespace detail {

class Interner {
 public:
  explicit Interner(std::vector<std::string>& table) : table_(table) {}

  int intern(const std::string& key) {
    auto [it, inserted] = index_.emplace(key, static_cast<int>(table_.size()));
    if (inserted) table_.push_back(key);
    return it->second;
  }

  const int* find(const std::string& key) const {
    auto it = index_.find(key);
    return it == index_.end() ? nullptr : &it->second;
  }

 private:
  std::vector<std::string>& table_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace detail

// Loads and validates the six input files. Parsing is strict: unknown
// columns, duplicate keys, dangling references and rows violating record
// invariants all raise DataError naming the file and entity.
inline Corpus load_corpus(const std::filesystem::path& dir,
                          const EngineConfig& config) {
  config.validate();
  Corpus corpus;
  corpus.window_start = config.window_start;
  corpus.window_end = config.window_end;

  detail::Interner uda_interner(corpus.uda_ids);
  detail::Interner category_interner(corpus.category_ids);
  detail::Interner journal_interner(corpus.journal_ids);
  std::unordered_map<std::string, int> sds_index;
  std::unordered_map<std::string, int> researcher_index;
  std::unordered_map<std::string, int> publication_index;

  {  // classification.csv
    static constexpr std::string_view kHeader[] = {"sds_id", "uda_id", "sds_name"};
    auto rows = csv::read_file(dir / "classification.csv", kHeader);
    corpus.load_stats.classification_rows = rows.size();
    for (const csv::Row& row : rows) {
      SdsInfo info;
      info.id = row.fields[0];
      info.uda = uda_interner.intern(row.fields[1]);
      info.name = row.fields[2];
      auto [it, inserted] =
          sds_index.emplace(info.id, static_cast<int>(corpus.sds.size()));
      if (!inserted) {
        throw DataError("classification.csv:" + std::to_string(row.line) +
                        ": duplicate sds_id '" + info.id + "'");
      }
      corpus.sds.push_back(std::move(info));
    }
  }

  {  // researchers.csv
    static constexpr std::string_view kHeader[] = {
        "researcher_id", "sds_id", "changed_university",
        "changed_sds",   "entered", "left"};
    auto rows = csv::read_file(dir / "researchers.csv", kHeader);
    corpus.load_stats.researcher_rows = rows.size();
    corpus.researchers.reserve(rows.size());
    const std::string file = "researchers.csv";
    for (const csv::Row& row : rows) {
      ResearcherRecord rec;
      rec.id = row.fields[0];
      const int* sds = sds_index.count(row.fields[1])
                           ? &sds_index.at(row.fields[1])
                           : nullptr;
      if (!sds) {
        throw DataError(file + ":" + std::to_string(row.line) +
                        ": researcher '" + rec.id +
                        "' references unknown sds_id '" + row.fields[1] + "'");
      }
      rec.sds = *sds;
      rec.changed_university =
          csv::parse_bool01(row.fields[2], file, row.line, "changed_university");
      rec.changed_sds =
          csv::parse_bool01(row.fields[3], file, row.line, "changed_sds");
      rec.entered_during_period =
          csv::parse_bool01(row.fields[4], file, row.line, "entered");
      rec.left_during_period =
          csv::parse_bool01(row.fields[5], file, row.line, "left");
      auto [it, inserted] = researcher_index.emplace(
          rec.id, static_cast<int>(corpus.researchers.size()));
      if (!inserted) {
        throw DataError(file + ":" + std::to_string(row.line) +
                        ": duplicate researcher_id '" + rec.id + "'");
      }
      corpus.researchers.push_back(std::move(rec));
    }
  }

  {  // publications.csv
    static constexpr std::string_view kHeader[] = {
        "pub_id", "year", "citation_count", "journal_id", "total_author_count"};
    auto rows = csv::read_file(dir / "publications.csv", kHeader);
    corpus.load_stats.publication_rows = rows.size();
    corpus.publications.reserve(rows.size());
    const std::string file = "publications.csv";
    for (const csv::Row& row : rows) {
      PublicationRecord rec;
      rec.id = row.fields[0];
      rec.year = static_cast<int>(csv::parse_int(row.fields[1], file, row.line, "year"));
      if (rec.year < config.window_start || rec.year > config.window_end) {
        throw DataError(file + ":" + std::to_string(row.line) +
                        ": publication '" + rec.id + "' year " +
                        std::to_string(rec.year) +
                        " outside observation window " +
                        std::to_string(config.window_start) + "-" +
                        std::to_string(config.window_end));
      }
      rec.citation_count = static_cast<int>(
          csv::parse_int(row.fields[2], file, row.line, "citation_count"));
      if (rec.citation_count < 0) {
        throw DataError(file + ":" + std::to_string(row.line) +
                        ": publication '" + rec.id +
                        "' has negative citation_count");
      }
      if (!row.fields[3].empty()) {
        rec.journal = journal_interner.intern(row.fields[3]);
      }
      rec.total_author_count = static_cast<int>(
          csv::parse_int(row.fields[4], file, row.line, "total_author_count"));
      if (rec.total_author_count < 1) {
        throw DataError(file + ":" + std::to_string(row.line) +
                        ": publication '" + rec.id +
                        "' must have total_author_count >= 1, got " +
                        std::to_string(rec.total_author_count));
      }
      auto [it, inserted] = publication_index.emplace(
          rec.id, static_cast<int>(corpus.publications.size()));
      if (!inserted) {
        throw DataError(file + ":" + std::to_string(row.line) +
                        ": duplicate pub_id '" + rec.id + "'");
      }
      corpus.publications.push_back(std::move(rec));
    }
  }

  {  // pub_categories.csv
    static constexpr std::string_view kHeader[] = {"pub_id", "category_id"};
    auto rows = csv::read_file(dir / "pub_categories.csv", kHeader);
    corpus.load_stats.category_rows = rows.size();
    const std::string file = "pub_categories.csv";
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(rows.size());
    for (const csv::Row& row : rows) {
      auto pub_it = publication_index.find(row.fields[0]);
      if (pub_it == publication_index.end()) {
        throw DataError(file + ":" + std::to_string(row.line) +
                        ": references unknown pub_id '" + row.fields[0] + "'");
      }
      const int category = category_interner.intern(row.fields[1]);
      const std::uint64_t key =
          (static_cast<std::uint64_t>(pub_it->second) << 24) |
          static_cast<std::uint64_t>(category);
      if (!seen.insert(key).second) {
        throw DataError(file + ":" + std::to_string(row.line) +
                        ": duplicate category '" + row.fields[1] +
                        "' for pub_id '" + row.fields[0] + "'");
      }
      corpus.publications[pub_it->second].categories.push_back(category);
    }
  }

  {  // pub_authors.csv
    static constexpr std::string_view kHeader[] = {"pub_id", "researcher_id"};
    auto rows = csv::read_file(dir / "pub_authors.csv", kHeader);
    corpus.load_stats.authorship_rows = rows.size();
    const std::string file = "pub_authors.csv";
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(rows.size());
    for (const csv::Row& row : rows) {
      auto pub_it = publication_index.find(row.fields[0]);
      if (pub_it == publication_index.end()) {
        throw DataError(file + ":" + std::to_string(row.line) +
                        ": references unknown pub_id '" + row.fields[0] + "'");
      }
      auto res_it = researcher_index.find(row.fields[1]);
      if (res_it == researcher_index.end()) {
        throw DataError(file + ":" + std::to_string(row.line) +
                        ": references unknown researcher_id '" + row.fields[1] +
                        "'");
      }
      const std::uint64_t key =
          (static_cast<std::uint64_t>(pub_it->second) << 26) |
          static_cast<std::uint64_t>(res_it->second);
      if (!seen.insert(key).second) {
        throw DataError(file + ":" + std::to_string(row.line) +
                        ": duplicate authorship (" + row.fields[0] + ", " +
                        row.fields[1] + ")");
      }
      corpus.publications[pub_it->second].authors.push_back(res_it->second);
    }
  }

  {  // journals.csv
    static constexpr std::string_view kHeader[] = {"journal_id", "year",
                                                   "category_id", "impact_factor"};
    auto rows = csv::read_file(dir / "journals.csv", kHeader);
    corpus.load_stats.journal_rows = rows.size();
    corpus.journal_impacts.reserve(rows.size());
    const std::string file = "journals.csv";
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(rows.size());
    for (const csv::Row& row : rows) {
      JournalImpactRecord rec;
      rec.journal = journal_interner.intern(row.fields[0]);
      rec.year = static_cast<int>(csv::parse_int(row.fields[1], file, row.line, "year"));
      rec.category = category_interner.intern(row.fields[2]);
      rec.impact_factor =
          csv::parse_real(row.fields[3], file, row.line, "impact_factor");
      if (rec.impact_factor < 0.0) {
        throw DataError(file + ":" + std::to_string(row.line) + ": journal '" +
                        row.fields[0] + "' has negative impact_factor");
      }
      const std::uint64_t key =
          Corpus::impact_key(rec.journal, rec.category, rec.year);
      if (!seen.insert(key).second) {
        throw DataError(file + ":" + std::to_string(row.line) +
                        ": duplicate (journal_id, year, category_id) key (" +
                        row.fields[0] + ", " + row.fields[1] + ", " +
                        row.fields[2] + ")");
      }
      corpus.journal_impacts.push_back(rec);
    }
  }

  if (corpus.category_ids.size() >= 65536) {
    throw DataError("too many distinct subject categories (limit 65535)");
  }

  for (const PublicationRecord& pub : corpus.publications) {
    if (pub.categories.empty()) {
      throw DataError("publications.csv: publication '" + pub.id +
                      "' has no subject category rows");
    }
    if (pub.authors.empty()) {
      throw DataError("publications.csv: publication '" + pub.id +
                      "' has no authorship rows");
    }
    if (static_cast<std::size_t>(pub.total_author_count) < pub.authors.size()) {
      throw DataError("publications.csv: publication '" + pub.id +
                      "' lists total_author_count " +
                      std::to_string(pub.total_author_count) + " but " +
                      std::to_string(pub.authors.size()) + " corpus authors");
    }
  }

  corpus.rebuild_impact_index();
  return corpus;
}

// Removes every researcher flagged as mobile (changed university or SDS,
// entered or left during the window). Their authorship links are dropped,
// but their publications stay in the corpus and keep the original
// total_author_count, so normalization pools are unaffected.
inline Corpus apply_stability_filter(const Corpus& corpus) {
  Corpus out;
  out.window_start = corpus.window_start;
  out.window_end = corpus.window_end;
  out.journal_impacts = corpus.journal_impacts;
  out.sds = corpus.sds;
  out.uda_ids = corpus.uda_ids;
  out.category_ids = corpus.category_ids;
  out.journal_ids = corpus.journal_ids;
  out.load_stats = corpus.load_stats;

  std::vector<int> remap(corpus.researchers.size(), -1);
  out.researchers.reserve(corpus.researchers.size());
  for (std::size_t i = 0; i < corpus.researchers.size(); ++i) {
    if (corpus.researchers[i].mobile()) continue;
    remap[i] = static_cast<int>(out.researchers.size());
    out.researchers.push_back(corpus.researchers[i]);
  }

  out.publications = corpus.publications;
  for (PublicationRecord& pub : out.publications) {
    std::vector<int> kept;
    kept.reserve(pub.authors.size());
    for (int author : pub.authors) {
      if (remap[author] >= 0) kept.push_back(remap[author]);
    }
    pub.authors = std::move(kept);
  }

  out.rebuild_impact_index();
  return out;
}

// An SDS is eligible when at least `min_publishing_fraction` of its
// researchers have one or more attributed publications. Returns SDS indexes
// in ascending order. SDS with zero researchers are excluded with a warning.
inline std::vector<int> select_eligible_sds(
    const Corpus& corpus, double min_publishing_fraction = 0.5,
    std::vector<std::string>* warnings = nullptr) {
  std::vector<int> staff(corpus.sds.size(), 0);
  std::vector<int> publishing(corpus.sds.size(), 0);
  std::vector<char> has_pub(corpus.researchers.size(), 0);
  for (const PublicationRecord& pub : corpus.publications) {
    for (int author : pub.authors) has_pub[author] = 1;
  }
  for (std::size_t i = 0; i < corpus.researchers.size(); ++i) {
    const int sds = corpus.researchers[i].sds;
    ++staff[sds];
    if (has_pub[i]) ++publishing[sds];
  }
  std::vector<int> eligible;
  for (std::size_t s = 0; s < corpus.sds.size(); ++s) {
    if (staff[s] == 0) {
      if (warnings) {
        warnings->push_back("sds '" + corpus.sds[s].id +
                            "' has no researchers; excluded");
      }
      continue;
    }
    if (static_cast<double>(publishing[s]) >=
        min_publishing_fraction * static_cast<double>(staff[s])) {
      eligible.push_back(static_cast<int>(s));
    }
  }
  return eligible;
}

}  // namespace scieval
