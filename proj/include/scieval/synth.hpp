#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scieval/error.hpp"

namespace scieval::synth {

// Self-contained deterministic random layer: xoshiro256** seeded through
// SplitMix64, with hand-fixed variate algorithms (Box-Muller normal,
// Marsaglia-Tsang gamma, Knuth poisson, gamma-poisson negative binomial).
// Nothing here depends on the standard library's unspecified distribution
// implementations, so a seed pins the generated bytes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t z = seed;
    for (auto& s : state_) {
      z += 0x9e3779b97f4a7c15ULL;
      std::uint64_t t = z;
      t = (t ^ (t >> 30)) * 0xbf58476d1ce4e5b9ULL;
      t = (t ^ (t >> 27)) * 0x94d049bb133111ebULL;
      s = t ^ (t >> 31);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // [0,1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // (0,1), safe under log()
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // [0, n)
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double lognormal(double mu, double sigma) {
    return std::exp(mu + sigma * normal());
  }

  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform_pos();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  int poisson(double lambda) {
    int total = 0;
    // split large rates to keep exp(-lambda) away from underflow; the sum
    // of independent poissons is poisson
    while (lambda > 500.0) {
      total += poisson_knuth(500.0);
      lambda -= 500.0;
    }
    return total + poisson_knuth(lambda);
  }

  // dispersion r > 0, mean >= 0; variance = mean + mean^2 / r
  int negative_binomial(double dispersion, double mean) {
    if (mean <= 0.0) return 0;
    const double scale = mean / dispersion;
    return poisson(gamma(dispersion) * scale);
  }

 private:
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  int poisson_knuth(double lambda) {
    if (lambda <= 0.0) return 0;
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform_pos();
    } while (p > limit);
    return k - 1;
  }

  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Productivity values follow a discretized log-normal, 1 + floor(LN),
// giving the heavy right tail typical of publication counts.
inline int draw_productivity(Rng& rng, double mu, double sigma, int cap) {
  const double raw = rng.lognormal(mu, sigma);
  double p = 1.0 + std::floor(raw);
  if (p > static_cast<double>(cap)) p = static_cast<double>(cap);
  return static_cast<int>(p);
}

// (p, c) pairs with c = a * p^gamma * exp(eps), eps ~ N(0, sigma^2).
inline std::vector<std::pair<double, double>> gen_power_law_pairs(
    int n, double a, double gamma, double sigma, std::uint64_t seed) {
  if (n < 3) throw DataError("gen_power_law_pairs: need n >= 3");
  if (!(a > 0.0)) throw DataError("gen_power_law_pairs: a must be positive");
  if (!(sigma >= 0.0)) throw DataError("gen_power_law_pairs: sigma must be >= 0");
  if (!std::isfinite(gamma)) throw DataError("gen_power_law_pairs: gamma must be finite");
  Rng rng(seed);
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double p = static_cast<double>(draw_productivity(rng, 1.2, 0.7, 10000));
    const double eps = sigma > 0.0 ? sigma * rng.normal() : 0.0;
    const double c = a * std::pow(p, gamma) * std::exp(eps);
    pairs.emplace_back(p, c);
  }
  return pairs;
}

enum class Coupling { coupled, independent };
enum class CoauthorModel { poisson, dyadic };

struct SynthParams {
  int researcher_count = 1000;
  int sds_count = 10;
  int uda_count = 3;
  int categories_count = 0;  // 0 -> one subject category per SDS
  int journals_per_category = 20;
  int window_start = 2001;
  int window_end = 2005;

  double productivity_mu = 1.0;
  double productivity_sigma = 0.9;
  int max_publications = 400;

  Coupling coupling = Coupling::coupled;
  double true_gamma = 1.25;        // per-publication citation mean scales with p^(gamma-1)
  double researcher_quality_sigma = 0.35;  // persistent per-researcher quality spread
  double noise_sigma = 0.0;        // extra per-publication lognormal jitter
  double citation_mean = 8.0;
  double citation_dispersion = 6.0;
  double citation_field_spread = 0.3;  // per-category spread of the base mean
  double journal_coupling = 1.0;       // IF-preference strength in coupled mode

  CoauthorModel coauthor_model = CoauthorModel::poisson;
  double coauthor_lambda = 2.0;
  bool internal_coauthors = false;

  double journal_coverage = 0.95;
  double if_coverage = 0.9;
  double multi_category_fraction = 0.2;
  double mobile_fraction = 0.0;

  std::uint64_t seed = 1;

  void validate() const {
    if (researcher_count < 1) throw DataError("synth: researcher_count must be >= 1");
    if (sds_count < 1) throw DataError("synth: sds_count must be >= 1");
    if (uda_count < 1 || uda_count > sds_count) {
      throw DataError("synth: uda_count must lie in [1, sds_count]");
    }
    if (categories_count < 0) throw DataError("synth: categories_count must be >= 0");
    if (journals_per_category < 1) throw DataError("synth: journals_per_category must be >= 1");
    if (window_start > window_end) throw DataError("synth: window_start > window_end");
    if (!(productivity_sigma >= 0.0)) throw DataError("synth: productivity_sigma must be >= 0");
    if (max_publications < 1) throw DataError("synth: max_publications must be >= 1");
    if (!std::isfinite(true_gamma)) throw DataError("synth: true_gamma must be finite");
    if (!(researcher_quality_sigma >= 0.0)) {
      throw DataError("synth: researcher_quality_sigma must be >= 0");
    }
    if (!(noise_sigma >= 0.0)) throw DataError("synth: noise_sigma must be >= 0");
    if (!(citation_mean > 0.0) || citation_mean > 500.0) {
      throw DataError("synth: citation_mean must lie in (0, 500]");
    }
    if (!(citation_dispersion > 0.0)) throw DataError("synth: citation_dispersion must be > 0");
    if (!(citation_field_spread >= 0.0)) throw DataError("synth: citation_field_spread must be >= 0");
    if (!(coauthor_lambda >= 0.0)) throw DataError("synth: coauthor_lambda must be >= 0");
    for (double f : {journal_coverage, if_coverage, multi_category_fraction, mobile_fraction}) {
      if (!(f >= 0.0 && f <= 1.0)) {
        throw DataError("synth: coverage/fraction parameters must lie in [0,1]");
      }
    }
  }

  nlohmann::json to_json() const {
    return nlohmann::json{
        {"researcher_count", researcher_count},
        {"sds_count", sds_count},
        {"uda_count", uda_count},
        {"categories_count", categories_count},
        {"journals_per_category", journals_per_category},
        {"window_start", window_start},
        {"window_end", window_end},
        {"productivity_mu", productivity_mu},
        {"productivity_sigma", productivity_sigma},
        {"max_publications", max_publications},
        {"coupling", coupling == Coupling::coupled ? "coupled" : "independent"},
        {"true_gamma", true_gamma},
        {"researcher_quality_sigma", researcher_quality_sigma},
        {"noise_sigma", noise_sigma},
        {"citation_mean", citation_mean},
        {"citation_dispersion", citation_dispersion},
        {"citation_field_spread", citation_field_spread},
        {"journal_coupling", journal_coupling},
        {"coauthor_model", coauthor_model == CoauthorModel::poisson ? "poisson" : "dyadic"},
        {"coauthor_lambda", coauthor_lambda},
        {"internal_coauthors", internal_coauthors},
        {"journal_coverage", journal_coverage},
        {"if_coverage", if_coverage},
        {"multi_category_fraction", multi_category_fraction},
        {"mobile_fraction", mobile_fraction},
        {"seed", seed},
    };
  }

  static SynthParams from_json(const nlohmann::json& j) {
    SynthParams p;
    try {
      p.researcher_count = j.value("researcher_count", p.researcher_count);
      p.sds_count = j.value("sds_count", p.sds_count);
      p.uda_count = j.value("uda_count", p.uda_count);
      p.categories_count = j.value("categories_count", p.categories_count);
      p.journals_per_category = j.value("journals_per_category", p.journals_per_category);
      p.window_start = j.value("window_start", p.window_start);
      p.window_end = j.value("window_end", p.window_end);
      p.productivity_mu = j.value("productivity_mu", p.productivity_mu);
      p.productivity_sigma = j.value("productivity_sigma", p.productivity_sigma);
      p.max_publications = j.value("max_publications", p.max_publications);
      if (j.contains("coupling")) {
        const std::string mode = j.at("coupling").get<std::string>();
        if (mode == "coupled") p.coupling = Coupling::coupled;
        else if (mode == "independent") p.coupling = Coupling::independent;
        else throw DataError("synth: unknown coupling mode '" + mode + "'");
      }
      p.true_gamma = j.value("true_gamma", p.true_gamma);
      p.researcher_quality_sigma =
          j.value("researcher_quality_sigma", p.researcher_quality_sigma);
      p.noise_sigma = j.value("noise_sigma", p.noise_sigma);
      p.citation_mean = j.value("citation_mean", p.citation_mean);
      p.citation_dispersion = j.value("citation_dispersion", p.citation_dispersion);
      p.citation_field_spread = j.value("citation_field_spread", p.citation_field_spread);
      p.journal_coupling = j.value("journal_coupling", p.journal_coupling);
      if (j.contains("coauthor_model")) {
        const std::string model = j.at("coauthor_model").get<std::string>();
        if (model == "poisson") p.coauthor_model = CoauthorModel::poisson;
        else if (model == "dyadic") p.coauthor_model = CoauthorModel::dyadic;
        else throw DataError("synth: unknown coauthor_model '" + model + "'");
      }
      p.coauthor_lambda = j.value("coauthor_lambda", p.coauthor_lambda);
      p.internal_coauthors = j.value("internal_coauthors", p.internal_coauthors);
      p.journal_coverage = j.value("journal_coverage", p.journal_coverage);
      p.if_coverage = j.value("if_coverage", p.if_coverage);
      p.multi_category_fraction = j.value("multi_category_fraction", p.multi_category_fraction);
      p.mobile_fraction = j.value("mobile_fraction", p.mobile_fraction);
      p.seed = j.value("seed", p.seed);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("synth params: ") + e.what());
    }
    p.validate();
    return p;
  }

  static SynthParams from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("missing or unreadable params file: " + path.string());
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ": invalid JSON: " + e.what());
    }
    return from_json(j);
  }
};

// The six input files as in-memory CSV blobs; writing them and loading the
// directory back is lossless by construction.
struct CorpusFiles {
  std::string researchers;
  std::string publications;
  std::string pub_categories;
  std::string pub_authors;
  std::string journals;
  std::string classification;

  void write_to(const std::filesystem::path& dir) const {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    auto write = [&dir](const char* name, const std::string& content) {
      std::ofstream out(dir / name, std::ios::binary);
      if (!out) {
        throw DataError("cannot write file: " + (dir / name).string());
      }
      out << content;
    };
    write("researchers.csv", researchers);
    write("publications.csv", publications);
    write("pub_categories.csv", pub_categories);
    write("pub_authors.csv", pub_authors);
    write("journals.csv", journals);
    write("classification.csv", classification);
  }
};

namespace detail {

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline std::string zero_padded(const char* prefix, int value, int width) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, width, value);
  return buf;
}

}  // namespace detail

// Generates a corpus that passes load-time validation as-is. In coupled
// mode the per-publication citation mean scales with the author's
// productivity as p^(true_gamma - 1), so a researcher's total normalized
// citations grow like p^true_gamma, and journal choice is biased toward
// high impact factors; in independent mode citations and journals are
// drawn without reference to productivity.
inline CorpusFiles gen_synthetic_corpus(const SynthParams& params) {
  params.validate();
  Rng rng(params.seed);
  CorpusFiles files;

  const int n_categories =
      params.categories_count > 0 ? params.categories_count : params.sds_count;
  const int n_years = params.window_end - params.window_start + 1;

  // per-category citation base mean (mean-preserving lognormal spread)
  std::vector<double> base_mean(n_categories);
  for (int c = 0; c < n_categories; ++c) {
    const double s = params.citation_field_spread;
    base_mean[c] = params.citation_mean * std::exp(s * rng.normal() - 0.5 * s * s);
  }

  // journals: each belongs to one category; IF ascending per category for
  // quantile-based selection
  struct Journal {
    int index;
    double impact;
    bool covered;
  };
  std::vector<std::vector<Journal>> journals_by_category(n_categories);
  {
    int index = 0;
    for (int c = 0; c < n_categories; ++c) {
      auto& list = journals_by_category[c];
      list.reserve(static_cast<std::size_t>(params.journals_per_category));
      for (int k = 0; k < params.journals_per_category; ++k) {
        Journal j;
        j.index = index++;
        j.impact = rng.lognormal(0.3, 0.6);
        j.covered = rng.uniform() < params.if_coverage;
        list.push_back(j);
      }
      std::sort(list.begin(), list.end(),
                [](const Journal& a, const Journal& b) {
                  return a.impact < b.impact ||
                         (a.impact == b.impact && a.index < b.index);
                });
    }
  }

  auto category_id = [](int c) { return detail::zero_padded("CAT", c + 1, 4); };
  auto journal_id = [](int j) { return detail::zero_padded("J", j + 1, 6); };
  auto sds_id = [](int s) { return detail::zero_padded("SDS", s + 1, 4); };
  auto researcher_id = [](int r) { return detail::zero_padded("R", r + 1, 7); };

  {  // classification.csv
    std::string& out = files.classification;
    out = "sds_id,uda_id,sds_name\n";
    for (int s = 0; s < params.sds_count; ++s) {
      out += sds_id(s);
      out += ',';
      out += detail::zero_padded("UDA", (s % params.uda_count) + 1, 2);
      out += ",Sector ";
      out += std::to_string(s + 1);
      out += '\n';
    }
  }

  {  // journals.csv
    std::string& out = files.journals;
    out = "journal_id,year,category_id,impact_factor\n";
    for (int c = 0; c < n_categories; ++c) {
      for (const Journal& j : journals_by_category[c]) {
        if (!j.covered) continue;
        for (int y = 0; y < n_years; ++y) {
          out += journal_id(j.index);
          out += ',';
          out += std::to_string(params.window_start + y);
          out += ',';
          out += category_id(c);
          out += ',';
          out += detail::format_real(j.impact);
          out += '\n';
        }
      }
    }
  }

  struct ResearcherDraw {
    int sds;
    double latent;   // z score behind productivity and journal coupling
    double quality;  // persistent per-researcher citation-level multiplier
    int pubs;
    int flags;  // -1 = stable, otherwise which mobility flag is set
  };
  std::vector<ResearcherDraw> researchers(
      static_cast<std::size_t>(params.researcher_count));
  std::vector<std::vector<int>> researchers_by_sds(
      static_cast<std::size_t>(params.sds_count));

  {  // researchers.csv
    std::string& out = files.researchers;
    out = "researcher_id,sds_id,changed_university,changed_sds,entered,left\n";
    for (int r = 0; r < params.researcher_count; ++r) {
      ResearcherDraw& draw = researchers[static_cast<std::size_t>(r)];
      draw.sds = r % params.sds_count;
      draw.latent = rng.normal();
      const double raw =
          std::exp(params.productivity_mu + params.productivity_sigma * draw.latent);
      double pubs = 1.0 + std::floor(raw);
      if (pubs > params.max_publications) pubs = params.max_publications;
      draw.pubs = static_cast<int>(pubs);
      const double qs = params.researcher_quality_sigma;
      draw.quality = std::exp(qs * rng.normal() - 0.5 * qs * qs);
      draw.flags = rng.uniform() < params.mobile_fraction
                       ? static_cast<int>(rng.below(4))
                       : -1;
      researchers_by_sds[static_cast<std::size_t>(draw.sds)].push_back(r);

      out += researcher_id(r);
      out += ',';
      out += sds_id(draw.sds);
      for (int f = 0; f < 4; ++f) {
        out += draw.flags == f ? ",1" : ",0";
      }
      out += '\n';
    }
  }

  {  // publications.csv + pub_categories.csv + pub_authors.csv
    std::string& pubs = files.publications;
    std::string& cats = files.pub_categories;
    std::string& auths = files.pub_authors;
    pubs = "pub_id,year,citation_count,journal_id,total_author_count\n";
    cats = "pub_id,category_id\n";
    auths = "pub_id,researcher_id\n";

    const bool coupled = params.coupling == Coupling::coupled;
    int pub_counter = 0;
    std::vector<int> coauthors;
    for (int r = 0; r < params.researcher_count; ++r) {
      const ResearcherDraw& draw = researchers[static_cast<std::size_t>(r)];
      const int primary = draw.sds % n_categories;
      // in coupled mode the per-publication citation level follows
      // p^(gamma-1), so summed normalized citations scale like p^gamma;
      // the researcher quality factor is homoskedastic on the log scale
      const double citation_level =
          draw.quality *
          (coupled ? std::pow(static_cast<double>(draw.pubs), params.true_gamma - 1.0)
                   : 1.0);
      for (int k = 0; k < draw.pubs; ++k) {
        const std::string pid = detail::zero_padded("P", ++pub_counter, 8);
        const int year =
            params.window_start + static_cast<int>(rng.below(
                                      static_cast<std::uint64_t>(n_years)));

        // categories
        int secondary = -1;
        if (rng.uniform() < params.multi_category_fraction) {
          const int candidate =
              static_cast<int>(rng.below(static_cast<std::uint64_t>(n_categories)));
          if (candidate != primary) secondary = candidate;
        }

        // journal (quantile into the IF-ascending list; coupled mode tilts
        // the quantile toward high-IF journals for high-latent authors)
        int journal = -1;
        if (rng.uniform() < params.journal_coverage) {
          const auto& list = journals_by_category[static_cast<std::size_t>(primary)];
          double q;
          if (coupled) {
            const double w = std::exp(params.journal_coupling * draw.latent);
            q = std::pow(rng.uniform_pos(), 1.0 / w);
          } else {
            q = rng.uniform();
          }
          auto idx = static_cast<std::size_t>(q * static_cast<double>(list.size()));
          if (idx >= list.size()) idx = list.size() - 1;
          journal = list[idx].index;
        }

        // authors
        int total_authors;
        coauthors.clear();
        const int drawn = params.coauthor_model == CoauthorModel::poisson
                              ? 1 + rng.poisson(params.coauthor_lambda)
                              : 1 << rng.below(4);
        if (params.internal_coauthors) {
          const auto& peers = researchers_by_sds[static_cast<std::size_t>(draw.sds)];
          int want = std::min<int>(drawn, static_cast<int>(peers.size()));
          coauthors.push_back(r);
          int attempts = 0;
          while (static_cast<int>(coauthors.size()) < want && attempts < 16 * want) {
            const int peer = peers[rng.below(peers.size())];
            ++attempts;
            if (std::find(coauthors.begin(), coauthors.end(), peer) ==
                coauthors.end()) {
              coauthors.push_back(peer);
            }
          }
          total_authors = static_cast<int>(coauthors.size());
        } else {
          coauthors.push_back(r);
          total_authors = drawn;
        }

        // citations
        double mean = base_mean[static_cast<std::size_t>(primary)] * citation_level;
        if (params.noise_sigma > 0.0) {
          const double s = params.noise_sigma;
          mean *= std::exp(s * rng.normal() - 0.5 * s * s);
        }
        if (mean > 5000.0) mean = 5000.0;  // keeps poisson sampling bounded
        const int citations = rng.negative_binomial(params.citation_dispersion, mean);

        pubs += pid;
        pubs += ',';
        pubs += std::to_string(year);
        pubs += ',';
        pubs += std::to_string(citations);
        pubs += ',';
        if (journal >= 0) pubs += journal_id(journal);
        pubs += ',';
        pubs += std::to_string(total_authors);
        pubs += '\n';

        cats += pid;
        cats += ',';
        cats += category_id(primary);
        cats += '\n';
        if (secondary >= 0) {
          cats += pid;
          cats += ',';
          cats += category_id(secondary);
          cats += '\n';
        }

        for (int author : coauthors) {
          auths += pid;
          auths += ',';
          auths += researcher_id(author);
          auths += '\n';
        }
      }
    }
  }

  return files;
}

// Brute-force reference for the shared percentile convention: a direct
// strictly-greater count over the raw values. Kept deliberately separate
// from the indicators implementation (no sorting, no binary search) so the
// two can check each other.
inline double oracle_percentile(const std::vector<double>& values, double x) {
  if (values.empty()) throw ComputeError("oracle_percentile: empty value list");
  bool present = false;
  std::size_t greater = 0;
  for (double v : values) {
    if (v == x) present = true;
    if (v > x) ++greater;
  }
  if (!present) throw ComputeError("oracle_percentile: x not among the values");
  const std::size_t n = values.size();
  if (n == 1) return 50.0;
  return 100.0 * (1.0 - static_cast<double>(greater) / static_cast<double>(n - 1));
}

}  // namespace scieval::synth
