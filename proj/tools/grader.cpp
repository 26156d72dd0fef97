// grader: multiresolution-moment image grading from the command line.

#include <cstdio>
#if defined(__GLIBC__)
#include <malloc.h>
#endif
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mrgrade/atrous.hpp"
#include "mrgrade/ca.hpp"
#include "mrgrade/curvelet.hpp"
#include "mrgrade/distfit.hpp"
#include "mrgrade/features.hpp"
#include "mrgrade/image.hpp"
#include "mrgrade/knn.hpp"
#include "mrgrade/pipeline.hpp"
#include "mrgrade/ridgelet.hpp"
#include "mrgrade/tables.hpp"

namespace fs = std::filesystem;
using namespace mrgrade;

namespace {

struct Options {
  std::string input;
  std::string manifest;
  std::string test;
  std::string out;
  std::string config;
  std::string curvelet_config;
  std::string ca_mode;
  std::string dims;
  std::string angle_energy;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int k = 0;
  int scales = kDefaultWaveletScales;
};

PipelineConfig pipeline_config(const Options& opt) {
  PipelineConfig cfg = opt.config.empty() ? PipelineConfig{} : PipelineConfig::load(opt.config);
  if (!opt.curvelet_config.empty()) cfg.curvelet = CurveletConfig::load(opt.curvelet_config);
  if (!opt.ca_mode.empty()) cfg.ca_mode = parse_ca_mode(opt.ca_mode);
  if (opt.k > 0) cfg.k = opt.k;
  if (opt.seed_set) cfg.seed = opt.seed;
  return cfg;
}

// "7" -> (7, 7); "2:30" -> (2, 30); "" -> (lo, hi) defaults.
std::pair<int, int> parse_dims(const std::string& text, int lo, int hi) {
  if (text.empty()) return {lo, hi};
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      const int d = std::stoi(text);
      return {d, d};
    }
    return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ParseError("bad --dims '" + text + "' (expected d or dmin:dmax)");
  }
}

std::ostream& output_stream(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  return file;
}

int run_synth(const Options& opt) {
  DatasetSpec spec = DatasetSpec::load(opt.config);
  if (opt.seed_set) spec.seed = opt.seed;
  const auto result = synth_dataset(spec, opt.out);
  std::cout << "wrote " << result.train.size() + result.test.size() << " images to " << opt.out << "\n";
  return kExitOk;
}

int run_transform(const Options& opt) {
  const ImageGrid img = read_pgm(opt.input);
  const fs::path out = opt.out;
  fs::create_directories(out);
  const auto wavelet = atrous_2d(img, opt.scales);
  for (int s = 0; s < wavelet.levels(); ++s) {
    const std::string stem = "w" + std::to_string(s + 1);
    write_flat(wavelet.scales[s].pixels(), out / (stem + ".bin"));
    write_pgm(rescale_for_display(wavelet.scales[s]), out / (stem + ".pgm"));
  }
  write_flat(wavelet.smooth.pixels(), out / "smooth.bin");
  write_pgm(rescale_for_display(wavelet.smooth), out / "smooth.pgm");

  const CurveletConfig cfg = opt.curvelet_config.empty() ? CurveletConfig{} : CurveletConfig::load(opt.curvelet_config);
  const auto curvelet = curvelet_transform(img, cfg);
  for (int b = 0; b < curvelet.size(); ++b) {
    char name[32];
    std::snprintf(name, sizeof name, "c%02d.bin", b + 1);
    write_flat(curvelet.bands[b], out / name);
  }
  {
    std::ofstream labels(out / "curvelet_bands.csv");
    labels << "band,wavelet_scale,ridgelet_band\n";
    for (int b = 0; b < curvelet.size(); ++b) {
      labels << b + 1 << ',' << curvelet.labels[b].scale << ',' << curvelet.labels[b].band << "\n";
    }
  }

  if (!opt.angle_energy.empty()) {
    std::ofstream csv(opt.angle_energy);
    if (!csv) throw std::runtime_error("cannot write " + opt.angle_energy);
    csv << "scale,block,angle_index,angle_deg,energy\n";
    for (int s = 1; s <= cfg.wavelet_scales; ++s) {
      const int b = cfg.block_size(s);
      RidgeletTransform transform(b);
      const auto& scale = wavelet.scales[s - 1].pixels();
      int block = 0;
      for (int by = 0; by + b <= img.height(); by += b) {
        for (int bx = 0; bx + b <= img.width(); bx += b, ++block) {
          const auto energy = angle_energies(transform.ridgelet(scale.block(by, bx, b, b), cfg.ridgelet_bands[s - 1] - 1));
          for (int l = 0; l < energy.size(); ++l) {
            csv << s << ',' << block << ',' << l << ',' << format_value(pseudo_polar_angle(l, b) * 180.0 / 3.14159265358979323846)
                << ',' << format_value(energy(l)) << "\n";
          }
        }
      }
    }
  }
  std::cout << "wrote " << wavelet.levels() << " wavelet scales and " << curvelet.size() << " curvelet bands to "
            << out.string() << "\n";
  return kExitOk;
}

int run_features(const Options& opt) {
  const PipelineConfig cfg = pipeline_config(opt);
  const auto entries = read_manifest(opt.manifest);
  const auto run = compute_features(entries, cfg);
  std::vector<std::string> names;
  for (const auto& f : feature_layout(cfg.wavelet_scales, cfg.curvelet)) names.push_back(f.name());
  write_feature_csv(run.rows, names, opt.out);
  for (const auto& f : run.failures) std::cerr << "error: " << f.id << ": " << f.message << "\n";
  std::cout << "wrote " << run.rows.size() << " feature rows to " << opt.out << "\n";
  return run.failures.empty() ? kExitOk : kExitPartialFailure;
}

int run_fitdist(const Options& opt) {
  const ImageGrid img = read_pgm(opt.input);
  const auto table = compare_fits(img, opt.scales);
  std::ofstream file;
  std::ostream& out = output_stream(opt.out, file);
  out << "scale,lorentzian_mse,gaussian_mse,winner\n";
  for (const auto& row : table) {
    out << row.scale << ',' << format_value(row.lorentzian_mse) << ',' << format_value(row.gaussian_mse) << ','
        << to_string(row.winner) << "\n";
  }
  return kExitOk;
}

int run_ca(const Options& opt) {
  const LabeledTable table = read_labeled_csv(opt.input);
  const auto prepared = nonneg_prepare(table.values);
  FactorModel model = ca_fit(prepared.table);
  model.column_names = table.columns;
  const fs::path out = opt.out;
  fs::create_directories(out);
  save_model(model, out / "model.txt");

  LabeledTable factors;
  for (int k = 1; k <= model.factors(); ++k) factors.columns.push_back("f" + std::to_string(k));
  factors.ids = table.ids;
  factors.labels = table.labels;
  factors.values = model.row_coords;
  if (!opt.test.empty()) {
    const LabeledTable extra = read_labeled_csv(opt.test);
    if (extra.columns != table.columns) throw ParseError("supplementary table has different columns");
    const Eigen::Index n = factors.values.rows();
    factors.values.conservativeResize(n + extra.values.rows(), Eigen::NoChange);
    for (Eigen::Index i = 0; i < extra.values.rows(); ++i) {
      factors.values.row(n + i) =
          project_supplementary(model, extra.values.row(i).transpose().cwiseMax(0.0)).transpose();
      factors.ids.push_back(extra.ids[i]);
      factors.labels.push_back(extra.labels[i]);
    }
  }
  write_labeled_csv(factors, out / "factors.csv");

  std::ofstream inertia(out / "inertia.csv");
  inertia << "factor,singular_value,inertia_share\n";
  for (int k = 0; k < model.factors(); ++k) {
    inertia << k + 1 << ',' << format_value(model.singular_values(k)) << ','
            << format_value(model.inertia_shares(k)) << "\n";
  }
  std::ofstream contrib(out / "contributions.csv");
  contrib << "factor,feature,contribution,raw_contribution\n";
  for (int k = 1; k <= model.factors(); ++k) {
    const auto norm = contributions(model, k);
    const auto raw = contributions(model, k, ContributionScale::Raw);
    for (std::size_t j = 0; j < norm.size(); ++j) {
      contrib << k << ',' << model.column_names[j] << ',' << format_value(norm[j].value) << ','
              << format_value(raw[j].value) << "\n";
    }
  }
  std::cout << model.factors() << " factors; " << prepared.clipped << " negative entries clipped\n";
  return kExitOk;
}

int run_classify(const Options& opt) {
  const LabeledPoints train = read_labeled_csv(opt.input).points();
  const LabeledPoints test = read_labeled_csv(opt.test).points();
  const auto [d, unused] = parse_dims(opt.dims, train.dims(), train.dims());
  (void)unused;
  const auto cm = confusion(train, test, d, opt.k > 0 ? opt.k : 1);
  std::cout << cm.to_text() << cm.correct() << "/" << cm.total() << " correct\n";
  if (!opt.out.empty()) {
    std::ofstream csv(opt.out);
    if (!csv) throw std::runtime_error("cannot write " + opt.out);
    csv << cm.to_csv();
  }
  return kExitOk;
}

int run_sweep(const Options& opt) {
  const LabeledPoints train = read_labeled_csv(opt.input).points();
  const LabeledPoints test = read_labeled_csv(opt.test).points();
  const auto [dmin, dmax] = parse_dims(opt.dims, std::min(2, train.dims()), train.dims());
  const auto sweep = dimension_sweep(train, test, dmin, dmax, opt.k > 0 ? opt.k : 1);
  std::ofstream file;
  std::ostream& out = output_stream(opt.out, file);
  out << "d,total_correct\n";
  for (const auto& p : sweep) out << p.dims << ',' << p.correct << "\n";
  return kExitOk;
}

int run_pipeline_cmd(const Options& opt) {
  PipelineConfig cfg = pipeline_config(opt);
  if (!opt.dims.empty()) {
    const auto [lo, hi] = parse_dims(opt.dims, cfg.sweep_min, cfg.sweep_max);
    cfg.sweep_min = lo;
    cfg.sweep_max = hi;
  }
  const auto train_entries = read_manifest(opt.manifest);
  const auto test_entries = read_manifest(opt.test);
  const auto train = compute_features(train_entries, cfg);
  const auto test = compute_features(test_entries, cfg);
  for (const auto* run : {&train, &test}) {
    for (const auto& f : run->failures) std::cerr << "error: features: " << f.id << ": " << f.message << "\n";
  }

  const fs::path out = opt.out;
  fs::create_directories(out);
  const auto layout = feature_layout(cfg.wavelet_scales, cfg.curvelet);
  std::vector<std::string> names;
  for (const auto& f : layout) names.push_back(f.name());
  write_feature_csv(train.rows, names, out / "features_train.csv");
  write_feature_csv(test.rows, names, out / "features_test.csv");

  PipelineReport report;
  try {
    report = run_pipeline(train.rows, test.rows, layout, cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: analysis: " << e.what() << "\n";
    return kExitPartialFailure;
  }
  write_report(report, out);
  std::cout << "best dimension " << report.best_dims << ": " << report.best_confusion.correct() << "/"
            << report.best_confusion.total() << " correct (original features: " << report.raw_confusion.correct()
            << ")\nreport written to " << out.string() << "\n";
  return train.failures.empty() && test.failures.empty() ? kExitOk : kExitPartialFailure;
}

}  // namespace

int main(int argc, char** argv) {
#if defined(__GLIBC__)
  // Keep large coefficient buffers in the heap between images.
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
  CLI::App app{"Grade greyscale images by moments of wavelet and curvelet coefficients"};
  app.require_subcommand(1);
  Options opt;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) { opt.seed = s; opt.seed_set = true; }, "Random seed");
  };

  auto* synth = app.add_subcommand("synth", "Generate a labelled synthetic texture dataset");
  synth->add_option("--config", opt.config, "Dataset description file")->required();
  synth->add_option("--out", opt.out, "Output directory")->required();
  add_seed(synth);

  auto* transform = app.add_subcommand("transform", "Dump wavelet scales and curvelet bands of one image");
  transform->add_option("--input", opt.input, "Input PGM")->required();
  transform->add_option("--out", opt.out, "Output directory")->required();
  transform->add_option("--scales", opt.scales, "Wavelet detail scales");
  transform->add_option("--curvelet-config", opt.curvelet_config, "Curvelet layout file");
  transform->add_option("--angle-energy", opt.angle_energy, "Write per-block, per-angle ridgelet energies as CSV");

  auto* features = app.add_subcommand("features", "Extract moment features for a manifest");
  features->add_option("--manifest", opt.manifest, "Manifest CSV (id,label,path)")->required();
  features->add_option("--out", opt.out, "Feature CSV")->required();
  features->add_option("--config", opt.config, "Pipeline configuration file");
  features->add_option("--curvelet-config", opt.curvelet_config, "Curvelet layout file");

  auto* fitdist = app.add_subcommand("fitdist", "Lorentzian versus Gaussian fits per wavelet scale");
  fitdist->add_option("--input", opt.input, "Input PGM")->required();
  fitdist->add_option("--scales", opt.scales, "Wavelet detail scales");
  fitdist->add_option("--out", opt.out, "Output CSV (default stdout)");

  auto* ca = app.add_subcommand("ca", "Correspondence analysis of a feature CSV");
  ca->add_option("--input", opt.input, "Feature CSV (active rows)")->required();
  ca->add_option("--test", opt.test, "Feature CSV projected as supplementary rows");
  ca->add_option("--out", opt.out, "Output directory")->required();

  auto* classify = app.add_subcommand("classify", "k-NN confusion matrix");
  classify->add_option("--input", opt.input, "Training CSV (id,label,values...)")->required();
  classify->add_option("--test", opt.test, "Test CSV")->required();
  classify->add_option("--dims", opt.dims, "Use the first d coordinates");
  classify->add_option("--k", opt.k, "Neighbours");
  classify->add_option("--out", opt.out, "Confusion CSV");

  auto* sweep = app.add_subcommand("sweep", "Correct assignments per factor-subspace dimension");
  sweep->add_option("--input", opt.input, "Training CSV")->required();
  sweep->add_option("--test", opt.test, "Test CSV")->required();
  sweep->add_option("--dims", opt.dims, "dmin:dmax");
  sweep->add_option("--k", opt.k, "Neighbours");
  sweep->add_option("--out", opt.out, "Sweep CSV (default stdout)");

  auto* pipeline = app.add_subcommand("pipeline", "Features, correspondence analysis and k-NN grading");
  pipeline->add_option("--manifest", opt.manifest, "Training manifest")->required();
  pipeline->add_option("--test", opt.test, "Test manifest")->required();
  pipeline->add_option("--out", opt.out, "Report directory")->required();
  pipeline->add_option("--config", opt.config, "Pipeline configuration file");
  pipeline->add_option("--curvelet-config", opt.curvelet_config, "Curvelet layout file");
  pipeline->add_option("--ca-mode", opt.ca_mode, "all_active or train_active");
  pipeline->add_option("--dims", opt.dims, "Sweep range dmin:dmax");
  pipeline->add_option("--k", opt.k, "Neighbours");
  add_seed(pipeline);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*synth) return run_synth(opt);
    if (*transform) return run_transform(opt);
    if (*features) return run_features(opt);
    if (*fitdist) return run_fitdist(opt);
    if (*ca) return run_ca(opt);
    if (*classify) return run_classify(opt);
    if (*sweep) return run_sweep(opt);
    if (*pipeline) return run_pipeline_cmd(opt);
  } catch (const ParseError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartialFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartialFailure;
  }
  return kExitOk;
}
