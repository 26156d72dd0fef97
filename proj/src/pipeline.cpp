#include "mrgrade/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "mrgrade/image.hpp"
#include "mrgrade/keyvalue.hpp"

namespace mrgrade {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string zero_pad(int value, int width) {
  std::ostringstream os;
  os << std::setw(width) << std::setfill('0') << value;
  return os.str();
}

Eigen::MatrixXd stack(const std::vector<FeatureVector>& rows) {
  if (rows.empty()) throw InvalidInput("pipeline: no feature rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows.front().values.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].values.size() != m.cols()) throw InvalidInput("pipeline: ragged feature rows");
    m.row(static_cast<Eigen::Index>(i)) = rows[i].values.transpose();
  }
  return m;
}

LabeledPoints to_points(const std::vector<FeatureVector>& rows, const Eigen::MatrixXd& coords) {
  LabeledPoints pts;
  for (const auto& r : rows) {
    pts.ids.push_back(r.image_id);
    pts.labels.push_back(r.label.value_or(""));
  }
  pts.coords = coords;
  return pts;
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& m, const std::vector<int>& cols) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = m.col(cols[j]);
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

CaMode parse_ca_mode(const std::string& text) {
  if (text == "all_active" || text == "all-active") return CaMode::AllActive;
  if (text == "train_active" || text == "train-active") return CaMode::TrainActive;
  throw ParseError("unknown ca mode '" + text + "' (expected all_active or train_active)");
}

const char* to_string(CaMode mode) {
  return mode == CaMode::AllActive ? "all_active" : "train_active";
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  const auto kv = KeyValues::load(path);
  kv.require_known({"wavelet_scales", "curvelet_config", "histogram_bins", "k", "sweep_min",
                    "sweep_max", "ca_mode", "seed", "contribution_threshold", "threads"});
  PipelineConfig cfg;
  if (auto v = kv.get_int("wavelet_scales")) cfg.wavelet_scales = *v;
  if (auto v = kv.get("curvelet_config")) {
    std::filesystem::path p = *v;
    if (p.is_relative()) p = path.parent_path() / p;
    cfg.curvelet = CurveletConfig::load(p);
  }
  if (auto v = kv.get_int("histogram_bins")) cfg.histogram_bins = *v;
  if (auto v = kv.get_int("k")) cfg.k = *v;
  if (auto v = kv.get_int("sweep_min")) cfg.sweep_min = *v;
  if (auto v = kv.get_int("sweep_max")) cfg.sweep_max = *v;
  if (auto v = kv.get("ca_mode")) cfg.ca_mode = parse_ca_mode(*v);
  if (auto v = kv.get("seed")) {
    try {
      cfg.seed = std::stoull(*v);
    } catch (const std::exception&) {
      throw ParseError(path.string() + ": bad seed '" + *v + "'");
    }
  }
  if (auto v = kv.get_double("contribution_threshold")) cfg.contribution_threshold = *v;
  if (auto v = kv.get_int("threads")) cfg.threads = *v;
  if (cfg.wavelet_scales < 1 || cfg.histogram_bins < 1 || cfg.k < 1 || cfg.sweep_min < 1 ||
      cfg.sweep_max < 0 || cfg.threads < 0) {
    throw ParseError(path.string() + ": parameter out of range");
  }
  return cfg;
}

DatasetSpec DatasetSpec::parse(const std::string& text, const std::string& source) {
  const auto kv = KeyValues::parse(text, source);
  DatasetSpec spec;
  for (const auto& key : kv.keys()) {
    const std::string value = *kv.get(key);
    if (key == "seed") {
      try {
        spec.seed = std::stoull(value);
      } catch (const std::exception&) {
        throw ParseError(source + ": bad seed '" + value + "'");
      }
    } else if (key == "width") {
      spec.width = *kv.get_int(key);
    } else if (key == "height") {
      spec.height = *kv.get_int(key);
    } else if (key == "noise_sigma") {
      spec.noise_sigma = *kv.get_double(key);
    } else if (key == "train_per_class") {
      spec.train_per_class = *kv.get_int(key);
    } else if (key == "test_per_class") {
      spec.test_per_class = *kv.get_int(key);
    } else if (key.starts_with("class.")) {
      const std::string label = key.substr(6);
      if (label.empty() || label.find_first_of(",\"") != std::string::npos) {
        throw ParseError(source + ": bad class label '" + label + "'");
      }
      try {
        spec.classes.emplace_back(label, parse_texture(value));
      } catch (const ParseError& e) {
        throw ParseError(source + ": class '" + label + "': " + e.what());
      }
    } else {
      throw ParseError(source + ": unknown key '" + key + "'");
    }
  }
  if (spec.classes.empty()) throw ParseError(source + ": no class.<label> entries");
  if (spec.width < 1 || spec.height < 1 || spec.train_per_class < 0 || spec.test_per_class < 0 ||
      spec.noise_sigma < 0.0) {
    throw ParseError(source + ": parameter out of range");
  }
  return spec;
}

DatasetSpec DatasetSpec::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset spec " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path.string());
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(base) ^ stream) ^ index);
}

SynthResult synth_dataset(const DatasetSpec& spec, const std::filesystem::path& out_dir) {
  const auto image_dir = out_dir / "images";
  std::filesystem::create_directories(image_dir);
  SynthResult result;
  std::uint64_t counter = 0;
  for (std::size_t c = 0; c < spec.classes.size(); ++c) {
    const auto& [label, texture] = spec.classes[c];
    for (int split = 0; split < 2; ++split) {
      const int count = split == 0 ? spec.train_per_class : spec.test_per_class;
      for (int i = 0; i < count; ++i, ++counter) {
        const std::string id = label + (split == 0 ? "_train_" : "_test_") + zero_pad(i, 4);
        ImageGrid img = synth_texture(texture, spec.width, spec.height, derive_seed(spec.seed, 1, counter));
        if (spec.noise_sigma > 0.0) {
          img = add_gaussian_noise(img, spec.noise_sigma, derive_seed(spec.seed, 2, counter));
        }
        const std::filesystem::path rel = std::filesystem::path("images") / (id + ".pgm");
        write_pgm(img, out_dir / rel);
        (split == 0 ? result.train : result.test).push_back({id, label, rel});
      }
    }
  }
  std::vector<ManifestEntry> all = result.train;
  all.insert(all.end(), result.test.begin(), result.test.end());
  write_manifest(all, out_dir / "manifest.csv");
  write_manifest(result.train, out_dir / "train.csv");
  write_manifest(result.test, out_dir / "test.csv");
  return result;
}

FeatureRun compute_features(const std::vector<ManifestEntry>& entries, const PipelineConfig& cfg) {
  const std::size_t n = entries.size();
  std::vector<std::optional<FeatureVector>> rows(n);
  std::vector<std::string> errors(n);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const ImageGrid img = read_pgm(entries[i].path);
        FeatureVector fv = extract_features(img, cfg.wavelet_scales, cfg.curvelet);
        fv.image_id = entries[i].id;
        if (!entries[i].label.empty()) fv.label = entries[i].label;
        rows[i] = std::move(fv);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  unsigned threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  FeatureRun run;
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i]) {
      run.rows.push_back(std::move(*rows[i]));
    } else {
      run.failures.push_back({entries[i].id, errors[i]});
    }
  }
  return run;
}

PipelineReport run_pipeline(const std::vector<FeatureVector>& train,
                            const std::vector<FeatureVector>& test,
                            const std::vector<FeatureInfo>& layout, const PipelineConfig& cfg) {
  const Eigen::MatrixXd train_raw = stack(train);
  const Eigen::MatrixXd test_raw = stack(test);
  if (train_raw.cols() != static_cast<Eigen::Index>(layout.size()) || test_raw.cols() != train_raw.cols()) {
    throw InvalidInput("pipeline: feature vectors do not match the feature layout");
  }

  PipelineReport report;
  Eigen::MatrixXd active_raw = train_raw;
  if (cfg.ca_mode == CaMode::AllActive) {
    active_raw.resize(train_raw.rows() + test_raw.rows(), train_raw.cols());
    active_raw << train_raw, test_raw;
  }

  // Columns that clip to all zeros carry no mass and cannot enter the analysis.
  const auto zero_cols = zero_columns_after_clipping(active_raw);
  std::vector<int> keep;
  std::vector<FeatureInfo> kept_info;
  for (int j = 0; j < static_cast<int>(layout.size()); ++j) {
    if (std::find(zero_cols.begin(), zero_cols.end(), j) != zero_cols.end()) {
      report.dropped_features.push_back(layout[j].name());
    } else {
      keep.push_back(j);
      kept_info.push_back(layout[j]);
      report.feature_names.push_back(layout[j].name());
    }
  }

  const auto prepared = nonneg_prepare(select_columns(active_raw, keep));
  report.clipped_entries = prepared.clipped;
  report.model = ca_fit(prepared.table);
  report.model.column_names = report.feature_names;
  const int kdim = report.model.factors();
  if (kdim < 1) throw InvalidInput("pipeline: correspondence analysis found no factors");

  const Eigen::Index ntrain = train_raw.rows();
  Eigen::MatrixXd train_coords;
  Eigen::MatrixXd test_coords;
  if (cfg.ca_mode == CaMode::AllActive) {
    train_coords = report.model.row_coords.topRows(ntrain);
    test_coords = report.model.row_coords.bottomRows(test_raw.rows());
  } else {
    train_coords = report.model.row_coords;
    const Eigen::MatrixXd test_clipped = select_columns(test_raw, keep).cwiseMax(0.0);
    test_coords.resize(test_raw.rows(), kdim);
    for (Eigen::Index i = 0; i < test_raw.rows(); ++i) {
      test_coords.row(i) = project_supplementary(report.model, test_clipped.row(i).transpose()).transpose();
    }
  }

  const LabeledPoints train_pts = to_points(train, train_coords);
  const LabeledPoints test_pts = to_points(test, test_coords);

  report.factors.columns.clear();
  for (int k = 1; k <= kdim; ++k) report.factors.columns.push_back("f" + std::to_string(k));
  report.factors.ids = train_pts.ids;
  report.factors.ids.insert(report.factors.ids.end(), test_pts.ids.begin(), test_pts.ids.end());
  report.factors.labels = train_pts.labels;
  report.factors.labels.insert(report.factors.labels.end(), test_pts.labels.begin(), test_pts.labels.end());
  report.factors.values.resize(train_coords.rows() + test_coords.rows(), kdim);
  report.factors.values << train_coords, test_coords;

  const int dmin = std::min(cfg.sweep_min, kdim);
  const int dmax = cfg.sweep_max > 0 ? std::min(cfg.sweep_max, kdim) : kdim;
  report.sweep = dimension_sweep(train_pts, test_pts, dmin, std::max(dmin, dmax), cfg.k);
  const auto best = std::max_element(report.sweep.begin(), report.sweep.end(),
                                     [](const SweepPoint& a, const SweepPoint& b) { return a.correct < b.correct; });
  report.best_dims = best->dims;
  report.best_confusion = confusion(train_pts, test_pts, report.best_dims, cfg.k);
  report.raw_confusion = confusion(to_points(train, train_raw), to_points(test, test_raw), 0, cfg.k);

  for (int k = 1; k <= report.best_dims; ++k) {
    for (const auto& c : contributions(report.model, k)) {
      if (c.value > cfg.contribution_threshold) report.contributions.push_back({k, kept_info[c.feature], c.value});
    }
  }
  return report;
}

void write_report(const PipelineReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_labeled_csv(report.factors, out_dir / "factors.csv");
  save_model(report.model, out_dir / "model.txt");
  {
    auto out = open_out(out_dir / "sweep.csv");
    out << "d,total_correct\n";
    for (const auto& p : report.sweep) out << p.dims << ',' << p.correct << "\n";
  }
  {
    auto out = open_out(out_dir / "confusion.txt");
    out << "k-NN in the " << report.best_dims << "-dimensional factor space (factors 1-"
        << report.best_dims << "): " << report.best_confusion.correct() << "/"
        << report.best_confusion.total() << " correct\n";
    out << report.best_confusion.to_text() << "\n";
    out << "k-NN on the original " << report.raw_confusion.classes.size() << "-class, "
        << report.model.col_masses.size() + report.dropped_features.size()
        << "-dimensional feature vectors: " << report.raw_confusion.correct() << "/"
        << report.raw_confusion.total() << " correct\n";
    out << report.raw_confusion.to_text();
  }
  {
    auto out = open_out(out_dir / "confusion.csv");
    out << report.best_confusion.to_csv();
  }
  {
    auto out = open_out(out_dir / "contributions.csv");
    out << "factor,feature,transform,band,moment_order,contribution\n";
    for (const auto& c : report.contributions) {
      out << c.factor << ',' << c.feature.name() << ','
          << (c.feature.transform == FeatureInfo::Transform::Wavelet ? "wavelet" : "curvelet") << ','
          << c.feature.band << ',' << c.feature.order << ',' << format_value(c.value) << "\n";
    }
  }
  {
    auto out = open_out(out_dir / "summary.txt");
    const auto& m = report.model;
    out << "images: " << m.row_masses.size() << " active rows, " << report.factors.ids.size() << " total\n";
    out << "features: " << report.feature_names.size() << " active";
    if (!report.dropped_features.empty()) {
      out << ", dropped (all values <= 0):";
      for (const auto& d : report.dropped_features) out << ' ' << d;
    }
    out << "\nnegative entries clipped to zero: " << report.clipped_entries << "\n";
    out << "factors: " << m.factors() << "\n";
    out << "inertia explained:";
    for (int k = 0; k < std::min(m.factors(), 10); ++k) {
      char buf[32];
      std::snprintf(buf, sizeof buf, " f%d=%.1f%%", k + 1, 100.0 * m.inertia_shares(k));
      out << buf;
    }
    out << "\nbest dimension: " << report.best_dims << " (" << report.best_confusion.correct() << "/"
        << report.best_confusion.total() << " correct)\n";
    out << "original feature space: " << report.raw_confusion.correct() << "/" << report.raw_confusion.total()
        << " correct\n";
    out << "features with contribution above threshold on factors 1-" << report.best_dims << ":\n";
    for (const auto& c : report.contributions) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", c.value);
      out << "  factor " << c.factor << ": " << c.feature.describe() << " [" << c.feature.name() << "] " << buf
          << "\n";
    }
  }
}

}  // namespace mrgrade
