#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mrgrade/ca.hpp"
#include "mrgrade/curvelet.hpp"
#include "mrgrade/features.hpp"
#include "mrgrade/knn.hpp"
#include "mrgrade/synth.hpp"
#include "mrgrade/tables.hpp"

namespace mrgrade {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitPartialFailure = 1, kExitConfigError = 2 };

enum class CaMode {
  AllActive,    // train and test rows both define the factors
  TrainActive,  // factors from training rows; test rows projected as supplementary
};

CaMode parse_ca_mode(const std::string& text);
const char* to_string(CaMode mode);

struct PipelineConfig {
  int wavelet_scales = kDefaultWaveletScales;
  CurveletConfig curvelet;
  int histogram_bins = 100;
  int k = 1;
  int sweep_min = 2;
  int sweep_max = 0;  // 0: up to the number of factors
  CaMode ca_mode = CaMode::AllActive;
  std::uint64_t seed = 0;
  double contribution_threshold = 0.1;
  int threads = 0;  // 0: hardware concurrency

  /// `key = value` file. Keys: wavelet_scales, curvelet_config (path, relative
  /// to the file), histogram_bins, k, sweep_min, sweep_max, ca_mode, seed,
  /// contribution_threshold, threads.
  static PipelineConfig load(const std::filesystem::path& path);
};

/// Synthetic labelled dataset description, `key = value` lines:
///   seed, width, height, noise_sigma, train_per_class, test_per_class,
///   class.<label> = <texture descriptor>   (one line per class)
struct DatasetSpec {
  std::uint64_t seed = 1;
  int width = 512;
  int height = 512;
  double noise_sigma = 0.0;
  int train_per_class = 50;
  int test_per_class = 100;
  std::vector<std::pair<std::string, TextureSpec>> classes;

  static DatasetSpec parse(const std::string& text, const std::string& source = "<string>");
  static DatasetSpec load(const std::filesystem::path& path);
};

struct SynthResult {
  std::vector<ManifestEntry> train;
  std::vector<ManifestEntry> test;
};

/// Writes images/<id>.pgm plus manifest.csv, train.csv and test.csv under
/// `out_dir`. Output is a pure function of the spec.
SynthResult synth_dataset(const DatasetSpec& spec, const std::filesystem::path& out_dir);

/// Deterministic per-item seed derived from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index);

struct FeatureFailure {
  std::string id;
  std::string message;
};

struct FeatureRun {
  std::vector<FeatureVector> rows;  // manifest order, failed entries omitted
  std::vector<FeatureFailure> failures;
};

/// Feature extraction over a manifest. Images are processed concurrently;
/// output order follows the manifest.
FeatureRun compute_features(const std::vector<ManifestEntry>& entries, const PipelineConfig& cfg);

struct ContributionEntry {
  int factor = 0;
  FeatureInfo feature;
  double value = 0.0;
};

struct PipelineReport {
  FactorModel model;
  std::vector<std::string> feature_names;  // active CA columns
  std::vector<std::string> dropped_features;
  int clipped_entries = 0;
  LabeledTable factors;  // train rows then test rows
  std::vector<SweepPoint> sweep;
  int best_dims = 0;
  ConfusionMatrix best_confusion;
  ConfusionMatrix raw_confusion;  // k-NN on the unprocessed feature vectors
  std::vector<ContributionEntry> contributions;
};

/// Clipping, correspondence analysis, dimension sweep, confusion at the best
/// dimension, raw-feature baseline and contribution summary.
PipelineReport run_pipeline(const std::vector<FeatureVector>& train,
                            const std::vector<FeatureVector>& test,
                            const std::vector<FeatureInfo>& layout, const PipelineConfig& cfg);

/// factors.csv, sweep.csv, confusion.txt, confusion.csv, contributions.csv,
/// model.txt and summary.txt.
void write_report(const PipelineReport& report, const std::filesystem::path& out_dir);

}  // namespace mrgrade
