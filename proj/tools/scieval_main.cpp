// scieval: batch research-evaluation engine.
//
//   scieval validate --input-dir data/ [--config cfg.json]
//   scieval analyze  --input-dir data/ --output-dir out/ [--config cfg.json]
//                    [--seed N] [--format csv|markdown|both]
//   scieval synth    --params params.json --output-dir data/ [--seed N]
//   scieval report   --run out/analysis_run.json --output-dir out2/
//                    [--format csv|markdown|both]
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "scieval/scieval.hpp"

namespace {

scieval::BundleFormat parse_format(const std::string& format) {
  if (format == "csv") return scieval::BundleFormat::csv;
  if (format == "markdown") return scieval::BundleFormat::markdown;
  if (format == "both") return scieval::BundleFormat::both;
  throw CLI::ValidationError("--format", "expected csv, markdown or both");
}

scieval::EngineConfig load_config(const std::string& config_path,
                                  const std::optional<std::uint64_t>& seed) {
  scieval::EngineConfig config;
  if (!config_path.empty()) {
    config = scieval::EngineConfig::from_json_file(config_path);
  }
  if (seed) config.seed = *seed;  // flags win over the config file
  return config;
}

int run_validate(const std::string& input_dir, const std::string& config_path) {
  const scieval::EngineConfig config = load_config(config_path, std::nullopt);
  const scieval::Corpus corpus = scieval::load_corpus(input_dir, config);

  std::cout << "corpus ok\n"
            << "  researchers:      " << corpus.researchers.size() << "\n"
            << "  publications:     " << corpus.publications.size() << "\n"
            << "  authorship rows:  " << corpus.load_stats.authorship_rows << "\n"
            << "  category rows:    " << corpus.load_stats.category_rows << "\n"
            << "  journal IF rows:  " << corpus.journal_impacts.size() << "\n"
            << "  SDS:              " << corpus.sds.size() << "\n"
            << "  window:           " << corpus.window_start << "-"
            << corpus.window_end << "\n";

  const scieval::Corpus filtered = scieval::apply_stability_filter(corpus);
  std::vector<std::string> warnings;
  const auto eligible =
      scieval::select_eligible_sds(filtered, config.min_publishing_fraction, &warnings);
  std::cout << "  stable researchers: " << filtered.researchers.size() << "\n"
            << "  eligible SDS:       " << eligible.size() << " of "
            << filtered.sds.size() << "\n";
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

int run_analyze(const std::string& input_dir, const std::string& output_dir,
                const std::string& config_path,
                const std::optional<std::uint64_t>& seed,
                const std::string& format) {
  const scieval::EngineConfig config = load_config(config_path, seed);
  const scieval::AnalysisRun run = scieval::analyze_directory(input_dir, config);
  scieval::write_report_bundle(run, output_dir, parse_format(format));
  for (const std::string& w : run.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "report bundle written to " << output_dir << "\n";
  return 0;
}

int run_synth(const std::string& params_path, const std::string& output_dir,
              const std::optional<std::uint64_t>& seed) {
  scieval::synth::SynthParams params =
      scieval::synth::SynthParams::from_json_file(params_path);
  if (seed) params.seed = *seed;
  const scieval::synth::CorpusFiles files = scieval::synth::gen_synthetic_corpus(params);
  files.write_to(output_dir);
  std::cout << "synthetic corpus written to " << output_dir << "\n";
  return 0;
}

int run_report(const std::string& run_path, const std::string& output_dir,
               const std::string& format) {
  scieval::render_run_document(run_path, output_dir, parse_format(format));
  std::cout << "tables rendered to " << output_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scieval: field-normalized research evaluation engine"};
  app.require_subcommand(1);

  std::string input_dir, output_dir, config_path, params_path, run_path;
  std::string format = "both";
  std::optional<std::uint64_t> seed;

  CLI::App* validate = app.add_subcommand("validate", "load and validate a corpus");
  validate->add_option("--input-dir", input_dir, "corpus directory")->required();
  validate->add_option("--config", config_path, "engine config JSON");

  CLI::App* analyze = app.add_subcommand("analyze", "run the full analysis pipeline");
  analyze->add_option("--input-dir", input_dir, "corpus directory")->required();
  analyze->add_option("--output-dir", output_dir, "report bundle directory")->required();
  analyze->add_option("--config", config_path, "engine config JSON");
  analyze->add_option("--seed", seed, "seed recorded in the run provenance");
  analyze->add_option("--format", format, "table format: csv, markdown or both");

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth->add_option("--params", params_path, "generator params JSON")->required();
  synth->add_option("--output-dir", output_dir, "corpus directory to write")->required();
  synth->add_option("--seed", seed, "override the params seed");

  CLI::App* report = app.add_subcommand("report", "re-render tables of a stored run");
  report->add_option("--run", run_path, "analysis_run.json of a previous analyze")->required();
  report->add_option("--output-dir", output_dir, "directory for the rendered tables")->required();
  report->add_option("--format", format, "table format: csv, markdown or both");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (validate->parsed()) return run_validate(input_dir, config_path);
    if (analyze->parsed())
      return run_analyze(input_dir, output_dir, config_path, seed, format);
    if (synth->parsed()) return run_synth(params_path, output_dir, seed);
    if (report->parsed()) return run_report(run_path, output_dir, format);
    return 1;
  } catch (const scieval::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const scieval::ComputeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
