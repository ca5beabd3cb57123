#include "cli/commands.hpp"
#include "cli/io_util.hpp"

#include "topo/error.hpp"
#include "topo/topo1.hpp"

#include <algorithm>
#include <map>

namespace topo::cli {
namespace {

// Predictions are matched by the id in their metadata, not by file name.
std::map<std::uint64_t, SampleRecord> read_predictions(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".topo") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::map<std::uint64_t, SampleRecord> out;
  for (const fs::path& f : files) {
    SampleRecord r = read_sample(f);
    const std::uint64_t id = r.meta.id;
    if (!out.emplace(id, std::move(r)).second) {
      throw Error(ErrorCode::IdMismatch, "duplicate prediction id " + std::to_string(id));
    }
  }
  return out;
}

}  // namespace

MetricsReport cmd_evaluate(const EvaluateConfig& config) {
  if (config.split != "all") (void)parse_split(config.split);
  const DatasetManifest m = load_manifest(config.truth);
  std::map<std::uint64_t, SampleRecord> preds = read_predictions(config.predictions);

  std::vector<SampleRecord> truth;
  std::vector<SampleRecord> matched;
  for (const ManifestEntry& e : m.samples) {
    if (config.split != "all" && e.split != config.split) continue;
    truth.push_back(read_sample(config.truth / e.file));
    auto it = preds.find(e.id);
    if (it == preds.end()) {
      throw Error(ErrorCode::IdMismatch, "no prediction for sample " + std::to_string(e.id));
    }
    matched.push_back(std::move(it->second));
  }
  if (truth.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no ground-truth samples in split '" + config.split + "'");
  }

  EvaluationOptions options;
  options.compliance.penal = config.penal.value_or(m.simp.penal);
  options.compliance.binarize = config.binarize;
  options.histogram_bin_width = config.bin_width;
  options.split = config.split;
  MetricsReport report = evaluate_batch(matched, truth, m.domain, options);

  if (config.out) {
    fs::create_directories(*config.out);
    write_text_with(*config.out / "report.csv", [&](std::ostream& os) { write_report_csv(os, report); });
    write_text_with(*config.out / "sorted_series.csv",
                    [&](std::ostream& os) { write_sorted_series_csv(os, report); });
    write_text(*config.out / "summary.json", report_summary(report).dump(2) + "\n");
  }
  return report;
}

}  // namespace topo::cli
