#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "scieval/error.hpp"

namespace scieval {

enum class ProductivityIndicator { P, FP };
enum class QualityIndicator { QiCAve, QiCPerc, QiIf };

inline std::string to_string(ProductivityIndicator ind) {
  return ind == ProductivityIndicator::P ? "P" : "FP";
}

inline std::string to_string(QualityIndicator ind) {
  switch (ind) {
    case QualityIndicator::QiCAve: return "qi_c_ave";
    case QualityIndicator::QiCPerc: return "qi_c_perc";
    default: return "qi_if";
  }
}

inline ProductivityIndicator parse_productivity_indicator(const std::string& s) {
  if (s == "P") return ProductivityIndicator::P;
  if (s == "FP") return ProductivityIndicator::FP;
  throw DataError("unknown productivity_indicator '" + s + "' (expected P or FP)");
}

inline QualityIndicator parse_quality_indicator(const std::string& s) {
  if (s == "qi_c_ave") return QualityIndicator::QiCAve;
  if (s == "qi_c_perc") return QualityIndicator::QiCPerc;
  if (s == "qi_if") return QualityIndicator::QiIf;
  throw DataError("unknown quality_indicator '" + s +
                  "' (expected qi_c_ave, qi_c_perc or qi_if)");
}

struct EngineConfig {
  int window_start = 2001;
  int window_end = 2005;
  double min_publishing_fraction = 0.5;
  double top_fraction = 0.10;
  ProductivityIndicator productivity_indicator = ProductivityIndicator::P;
  QualityIndicator quality_indicator = QualityIndicator::QiCAve;
  bool intersection_mode = false;
  int output_precision = 3;
  std::uint64_t seed = 0;

  void validate() const {
    if (window_start > window_end) {
      throw DataError("config: window_start must not exceed window_end");
    }
    if (!(min_publishing_fraction > 0.0 && min_publishing_fraction < 1.0) &&
        min_publishing_fraction != 1.0) {
      // the 50% rule admits any fraction in (0,1]; 0 would make every SDS eligible
      throw DataError("config: min_publishing_fraction must lie in (0,1]");
    }
    if (!(top_fraction > 0.0 && top_fraction < 1.0)) {
      throw DataError("config: top_fraction must lie in (0,1)");
    }
    if (output_precision < 0 || output_precision > 15) {
      throw DataError("config: output_precision must lie in [0,15]");
    }
  }

  nlohmann::json to_json() const {
    return nlohmann::json{
        {"window_start", window_start},
        {"window_end", window_end},
        {"min_publishing_fraction", min_publishing_fraction},
        {"top_fraction", top_fraction},
        {"productivity_indicator", to_string(productivity_indicator)},
        {"quality_indicator", to_string(quality_indicator)},
        {"intersection_mode", intersection_mode},
        {"output_precision", output_precision},
        {"seed", seed},
    };
  }

  static EngineConfig from_json(const nlohmann::json& j) {
    EngineConfig cfg;
    try {
      cfg.window_start = j.value("window_start", cfg.window_start);
      cfg.window_end = j.value("window_end", cfg.window_end);
      cfg.min_publishing_fraction =
          j.value("min_publishing_fraction", cfg.min_publishing_fraction);
      cfg.top_fraction = j.value("top_fraction", cfg.top_fraction);
      if (j.contains("productivity_indicator")) {
        cfg.productivity_indicator = parse_productivity_indicator(
            j.at("productivity_indicator").get<std::string>());
      }
      if (j.contains("quality_indicator")) {
        cfg.quality_indicator = parse_quality_indicator(
            j.at("quality_indicator").get<std::string>());
      }
      cfg.intersection_mode = j.value("intersection_mode", cfg.intersection_mode);
      cfg.output_precision = j.value("output_precision", cfg.output_precision);
      cfg.seed = j.value("seed", cfg.seed);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
  }

  static EngineConfig from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
      throw DataError("missing or unreadable config file: " + path.string());
    }
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ": invalid JSON: " + e.what());
    }
    return from_json(j);
  }
};

}  // namespace scieval
