#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <ostream>
#include <set>
#include <thread>

#include <CLI11.hpp>

#include "radgate/analysis.hpp"
#include "radgate/catalog.hpp"
#include "radgate/csv.hpp"
#include "radgate/error.hpp"
#include "radgate/features.hpp"
#include "radgate/fixtures.hpp"
#include "radgate/fsutil.hpp"
#include "radgate/nrrd.hpp"
#include "radgate/numfmt.hpp"
#include "radgate/parallel.hpp"
#include "radgate/preprocess.hpp"
#include "radgate/quality.hpp"
#include "radgate/raster.hpp"
#include "radgate/rtstruct.hpp"
#include "radgate/svg.hpp"
#include "radgate/unroll.hpp"
#include "radgate/volume_build.hpp"

namespace radgate::cli {

namespace {

class Log {
 public:
  Log(std::ostream& err, std::string prefix) : err_(err), prefix_(std::move(prefix)) {}
  void operator()(const std::string& message) const { err_ << prefix_ << ": " << message << '\n'; }

 private:
  std::ostream& err_;
  std::string prefix_;
};

unsigned resolve_jobs(int requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  if (const char* env = std::getenv("RADGATE_JOBS")) {
    if (auto n = parse_integer(env); n && *n > 0) return static_cast<unsigned>(*n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string safe_name(std::string_view name) {
  std::string out;
  for (char c : name) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
  if (out.empty() || out == "." || out == "..") out = "unnamed";
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// ---------------------------------------------------------------- describe

struct DescribeArgs {
  std::string root, mode = "default", out;
  int jobs = 0;
};

int do_describe(const DescribeArgs& a, const Log& log) {
  auto scan = catalog::scan_dataset({.root = a.root}, resolve_jobs(a.jobs));
  for (const auto& issue : scan.issues) log("skipped " + issue.path.string() + ": " + issue.reason);
  auto mode = a.mode == "ct" ? catalog::DescribeMode::Ct : catalog::DescribeMode::Default;
  auto table = catalog::describe(scan.records, mode);
  write_file_atomic(a.out, table.to_csv());
  log("wrote " + std::to_string(table.rows.size()) + " rows for " + std::to_string(scan.records.size()) +
      " series to " + a.out);
  return kOk;
}

// ------------------------------------------------------------------- check

struct CheckArgs {
  std::string root, spec, out;
  int jobs = 0;
};

int do_check(const CheckArgs& a, const Log& log) {
  auto spec = quality::parse_quality_spec(read_text_file(a.spec));
  spec.validate();
  auto scan = catalog::scan_dataset({.root = a.root}, resolve_jobs(a.jobs));
  for (const auto& issue : scan.issues) log("skipped " + issue.path.string() + ": " + issue.reason);
  auto report = quality::quality_check(scan.records, spec, scan.rejected);
  write_file_atomic(a.out, report.to_csv());
  auto passed = std::count_if(report.rows.begin(), report.rows.end(), [](const auto& r) { return r.overall; });
  log(std::to_string(passed) + " of " + std::to_string(report.rows.size()) + " series passed; wrote " + a.out);
  return kOk;
}

// ----------------------------------------------------------------- convert

struct ConvertArgs {
  std::string root, out, roi, spec;
  int jobs = 0;
};

struct ConvertResult {
  std::vector<std::pair<fs::path, std::vector<std::uint8_t>>> files;
  std::string status = "ok";
  std::vector<std::string> rois;
  std::vector<std::string> warnings;
};

ConvertResult convert_record(const fs::path& root, const catalog::SeriesRecord& record, const std::string& roi) {
  ConvertResult r;
  const fs::path dir = fs::path("converted_nrrds") / safe_name(record.patient_id);
  auto built = load_series_volume(root, record);
  r.warnings = built.warnings;
  r.files.emplace_back(dir / "image.nrrd", nrrd::encode(built.volume));

  std::vector<std::pair<std::string, Mask>> masks;
  for (const auto& path : record.rtstruct_paths) {
    auto obj = dicom::parse_file(read_binary_file(root / path));
    for (const auto& set : dicom::parse_rtstruct(obj)) {
      auto raster = rasterize(set, built.volume.geometry());
      for (const auto& w : raster.warnings) r.warnings.push_back(set.roi_name + ": " + w);
      masks.emplace_back(set.roi_name, std::move(raster.mask));
    }
  }
  std::set<std::string> used;
  for (const auto& [name, mask] : masks) {
    std::string file = "mask_" + safe_name(name);
    for (int n = 2; !used.insert(file).second; ++n) file = "mask_" + safe_name(name) + "_" + std::to_string(n);
    r.files.emplace_back(dir / (file + ".nrrd"), nrrd::encode(mask));
    r.rois.push_back(name);
  }
  if (masks.empty()) {
    if (!roi.empty()) throw Error(ErrorCode::InvalidParameter, "no RTSTRUCT to take ROI '" + roi + "' from");
    r.warnings.emplace_back("no RTSTRUCT; image only");
    return r;
  }
  auto chosen = roi.empty() ? masks.begin()
                            : std::find_if(masks.begin(), masks.end(), [&](const auto& m) { return m.first == roi; });
  if (chosen == masks.end()) throw Error(ErrorCode::InvalidParameter, "ROI '" + roi + "' not found");
  r.files.emplace_back(dir / "mask.nrrd", nrrd::encode(chosen->second));
  return r;
}

int do_convert(const ConvertArgs& a, const Log& log) {
  std::optional<quality::QualitySpec> spec;
  if (!a.spec.empty()) {
    spec = quality::parse_quality_spec(read_text_file(a.spec));
    spec->validate();
  }
  const unsigned jobs = resolve_jobs(a.jobs);
  auto scan = catalog::scan_dataset({.root = a.root}, jobs);
  for (const auto& rejected : scan.rejected)
    log("skipped " + rejected.patient_id + " (" + rejected.series_uid + "): " + rejected.reason);

  std::vector<ConvertResult> results(scan.records.size());
  parallel_for(scan.records.size(), jobs, [&](std::size_t i) {
    const auto& record = scan.records[i];
    if (spec) {
      auto row = quality::check_series(record, *spec);
      if (!row.overall) {
        results[i].status = "skipped: quality " + row.note;
        return;
      }
    }
    try {
      results[i] = convert_record(a.root, record, a.roi);
    } catch (const Error& e) {
      results[i] = ConvertResult{};
      results[i].status = std::string("failed: ") + e.what();
    }
  });

  OutputStage stage(a.out);
  CsvWriter report;
  report.row({"patient", "series_uid", "status", "rois", "warnings"});
  std::size_t converted = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const auto& record = scan.records[i];
    for (const auto& [path, bytes] : r.files) stage.write(path, bytes);
    if (r.status == "ok") ++converted;
    else log(record.patient_id + ": " + r.status);
    report.row({record.patient_id, record.series_uid, r.status, join(r.rois, ";"), join(r.warnings, ";")});
  }
  if (converted == 0) throw Error(ErrorCode::EmptyDataset, "no series could be converted");
  stage.write(fs::path("reports") / "convert_log.csv", report.str());
  stage.commit();
  log("converted " + std::to_string(converted) + " of " + std::to_string(results.size()) + " series into " + a.out);
  return kOk;
}

// ------------------------------------------------------------------ unroll

std::vector<catalog::NrrdCase> nrrd_cases(const std::string& input) {
  catalog::DatasetLayout layout;
  layout.root = input;
  layout.data_format = catalog::DataFormat::Nrrd;
  auto cases = catalog::scan_nrrd_dataset(layout);
  if (cases.empty()) throw Error(ErrorCode::EmptyDataset, "no NRRD cases under " + input);
  return cases;
}

struct UnrollArgs {
  std::string input, out, window;
  int jobs = 0;
};

int do_unroll(const UnrollArgs& a, const Log& log) {
  std::optional<Window> window;
  if (!a.window.empty()) {
    auto comma = a.window.find(',');
    auto level = parse_double(a.window.substr(0, comma));
    auto width = comma == std::string::npos ? std::nullopt : parse_double(a.window.substr(comma + 1));
    if (!level || !width || !(*width > 0))
      throw Error(ErrorCode::ConfigInvalid, "window: expected LEVEL,WIDTH with WIDTH > 0");
    window = Window{*level, *width};
  }
  auto cases = nrrd_cases(a.input);
  std::vector<std::vector<SliceImage>> images(cases.size());
  parallel_for(cases.size(), resolve_jobs(a.jobs), [&](std::size_t i) {
    Volume v = nrrd::read(cases[i].image);
    std::optional<Mask> mask;
    if (cases[i].mask) mask = nrrd::read_mask(*cases[i].mask);
    images[i] = unroll(v, mask ? &*mask : nullptr, window, cases[i].patient_id);
  });
  OutputStage stage(a.out);
  std::size_t count = 0;
  for (std::size_t i = 0; i < cases.size(); ++i)
    for (const auto& img : images[i]) {
      stage.write(fs::path("images_quick_check") / safe_name(cases[i].patient_id) / img.filename, img.bytes);
      ++count;
    }
  stage.commit();
  log("wrote " + std::to_string(count) + " slice images for " + std::to_string(cases.size()) + " patients");
  return kOk;
}

// -------------------------------------------------------------- preprocess

struct PreprocessArgs {
  std::string input, params, out;
  int jobs = 0;
};

int do_preprocess(const PreprocessArgs& a, const Log& log) {
  const fs::path params_dir = fs::path(a.params).parent_path();
  auto params = preprocess::parse_params(read_text_file(a.params), [&](const std::string& ref) {
    fs::path p(ref);
    return nrrd::read(p.is_absolute() ? p : params_dir / p);
  });
  auto cases = nrrd_cases(a.input);

  struct Outcome {
    std::vector<std::uint8_t> image, mask;
    std::string stats, failure;
  };
  std::vector<Outcome> outcomes(cases.size());
  parallel_for(cases.size(), resolve_jobs(a.jobs), [&](std::size_t i) {
    auto& o = outcomes[i];
    try {
      Volume v = nrrd::read(cases[i].image);
      std::optional<Mask> mask;
      if (cases[i].mask) mask = nrrd::read_mask(*cases[i].mask);
      auto result = preprocess::run_chain(v, params, mask ? &*mask : nullptr);
      o.image = nrrd::encode(result.volume);
      if (result.mask) o.mask = nrrd::encode(*result.mask);
      o.stats = preprocess::stats_csv(cases[i].patient_id, result.stats, false);
    } catch (const Error& e) {
      o = Outcome{};
      o.failure = e.what();
    }
  });

  OutputStage stage(a.out);
  std::string stats = preprocess::stats_csv("", {}, true);
  CsvWriter failures;
  failures.row({"patient", "reason"});
  std::size_t done = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& o = outcomes[i];
    if (!o.failure.empty()) {
      log(cases[i].patient_id + ": " + o.failure);
      failures.row({cases[i].patient_id, o.failure});
      continue;
    }
    fs::path dir = fs::path("preprocessed_nrrds") / safe_name(cases[i].patient_id);
    stage.write(dir / "image.nrrd", o.image);
    if (!o.mask.empty()) stage.write(dir / "mask.nrrd", o.mask);
    stats += o.stats;
    ++done;
  }
  if (done == 0) throw Error(ErrorCode::EmptyDataset, "preprocessing failed for every patient");
  stage.write(fs::path("reports") / "preprocess_stats.csv", stats);
  stage.write(fs::path("reports") / "preprocess_failures.csv", failures.str());
  stage.commit();
  log("preprocessed " + std::to_string(done) + " of " + std::to_string(cases.size()) + " patients with " +
      std::to_string(params.steps.size()) + " steps");
  return kOk;
}

// ----------------------------------------------------------------- extract

struct ExtractArgs {
  std::string input, params, out;
  int jobs = 0;
};

int do_extract(const ExtractArgs& a, const Log& log) {
  auto params = features::parse_extraction_params(read_text_file(a.params));
  auto cases = nrrd_cases(a.input);
  auto table = features::extract(
      cases.size(),
      [&](std::size_t i) {
        if (!cases[i].mask) throw Error(ErrorCode::EmptyMask, "no mask file");
        return features::CaseData{cases[i].patient_id, nrrd::read(cases[i].image), nrrd::read_mask(*cases[i].mask)};
      },
      params, resolve_jobs(a.jobs), [&](std::size_t i) { return cases[i].patient_id; });
  fs::path out(a.out);
  fs::path failures = out.parent_path() / (out.stem().string() + "_failures.csv");
  std::size_t failed = 0;
  for (const auto& row : table.rows)
    if (!row.failure.empty()) {
      log(row.patient_id + ": " + row.failure);
      ++failed;
    }
  write_file_atomic(failures, table.failures_csv());
  write_file_atomic(out, table.to_csv());
  log("extracted " + std::to_string(table.columns.size()) + " features for " +
      std::to_string(table.rows.size() - failed) + " of " + std::to_string(table.rows.size()) + " patients");
  return kOk;
}

// ----------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string features, outcome, patient_column = "patient", clinical, volume, out, handle_nan = "patients";
  std::vector<std::string> include, exclude, drop_patients, classes;
  double alpha = 0.05, auc_threshold = 0.70, corr_threshold = 0.75;
  int jobs = 0;
};

void stage_plot(OutputStage& stage, const std::string& name, const svg::Plot& plot) {
  stage.write(fs::path("plots") / (name + ".svg"), svg::render(plot));
  stage.write(fs::path("plots") / (name + ".csv"), svg::data_csv(plot));
}

svg::Plot distribution_plot(const analysis::FeatureTable& table, const std::vector<std::string>& classes) {
  svg::Plot plot;
  plot.kind = svg::Kind::Histogram;
  plot.title = "Feature distributions by " + table.outcome_name;
  for (const auto& f : table.features) {
    auto h = analysis::distributions(table, f, classes);
    svg::Plot::Panel panel{f, h.edges, {}};
    for (const auto& s : h.series) {
      svg::Series series{s.label, {}, {}, false};
      for (std::size_t b = 0; b < s.counts.size(); ++b) {
        series.x.push_back((h.edges[b] + h.edges[b + 1]) / 2);
        series.y.push_back(static_cast<double>(s.counts[b]));
      }
      panel.series.push_back(std::move(series));
    }
    plot.panels.push_back(std::move(panel));
  }
  std::size_t cols = 1;
  while (cols * cols < plot.panels.size()) ++cols;
  std::size_t rows = (plot.panels.size() + cols - 1) / cols;
  plot.width = static_cast<int>(300 * cols + 120);
  plot.height = static_cast<int>(220 * rows + 50);
  return plot;
}

svg::Plot bar_plot(std::string title, std::string y_label, std::size_t bars) {
  svg::Plot plot;
  plot.kind = svg::Kind::Bar;
  plot.title = std::move(title);
  plot.y_label = std::move(y_label);
  plot.width = std::max(480, static_cast<int>(90 + 40 * bars));
  plot.height = 520;
  return plot;
}

int do_analyze(const AnalyzeArgs& a, const Log& log) {
  if (a.handle_nan != "patients" && a.handle_nan != "features" && a.handle_nan != "none")
    throw Error(ErrorCode::ConfigInvalid, "handle-nan: expected patients, features or none");
  const unsigned jobs = resolve_jobs(a.jobs);
  analysis::LoadOptions options;
  options.patient_column = a.patient_column;
  options.outcome_column = a.outcome;
  options.include = a.include;
  options.exclude = a.exclude;
  options.drop_patients = a.drop_patients;
  std::optional<fs::path> clinical;
  if (!a.clinical.empty()) clinical = a.clinical;
  auto table = analysis::load_file(a.features, options, clinical);

  OutputStage stage(a.out);
  auto summary = analysis::class_summary(table);
  CsvWriter summary_csv;
  summary_csv.row({"label", "count", "balance"});
  std::vector<std::string> described;
  for (std::size_t i = 0; i < summary.labels.size(); ++i) {
    summary_csv.row({summary.labels[i], std::to_string(summary.counts[i]), format_shortest(summary.balance[i])});
    described.push_back((summary.labels[i].empty() ? "(missing)" : summary.labels[i]) + "=" +
                        format_significant(summary.balance[i], 3));
  }
  stage.write("class_summary.csv", summary_csv.str());
  log(std::to_string(table.patients.size()) + " patients, " + std::to_string(table.features.size()) +
      " features; classes " + join(described, ", "));

  if (a.handle_nan != "none") {
    auto axis = a.handle_nan == "patients" ? analysis::Axis::Patients : analysis::Axis::Features;
    auto report = analysis::handle_nan(table, axis);
    CsvWriter dropped;
    dropped.row({a.handle_nan == "patients" ? "dropped_patient" : "dropped_feature"});
    for (const auto& d : report.dropped) dropped.row({d});
    stage.write("nan_report.csv", dropped.str());
    log("handle_nan(" + a.handle_nan + ") dropped " + std::to_string(report.dropped.size()));
    table = std::move(report.table);
  }

  std::optional<std::string> volume;
  if (!a.volume.empty()) volume = a.volume;
  auto stats = analysis::basic_stats(table, volume, jobs);
  stage.write(fs::path(a.features).stem().string() + "_basic_stats.csv", stats.to_csv());

  stage_plot(stage, "distributions", distribution_plot(table, a.classes));

  auto matrix = analysis::spearman_matrix(table, jobs);
  svg::Plot heat;
  heat.kind = svg::Kind::Heatmap;
  heat.title = "Absolute Spearman correlation";
  heat.names = matrix.names;
  heat.cells = matrix.abs_rho;
  heat.width = std::max(480, static_cast<int>(260 + 28 * matrix.names.size()));
  heat.height = std::max(400, static_cast<int>(190 + 28 * matrix.names.size()));
  stage_plot(stage, "correlation_matrix", heat);

  const bool binary = analysis::is_binary(table);
  if (binary) {
    auto mw = analysis::mann_whitney(table, a.alpha, jobs);
    auto plot = bar_plot("Mann-Whitney p (Bonferroni)", "corrected p (log scale)", mw.size());
    plot.log_scale = true;
    plot.threshold = a.alpha;
    plot.highlight_color = svg::kYellow;
    plot.plain_color = svg::kPurple;
    for (const auto& r : mw) plot.bars.push_back({r.feature, r.p_corrected, r.highlight});
    stage_plot(stage, "mann_whitney", plot);

    auto roc = analysis::univariate_roc(table, a.auc_threshold, jobs);
    auto labels = analysis::class_labels(table);
    svg::Plot lines;
    lines.kind = svg::Kind::Line;
    lines.title = "Univariate ROC (positive class '" + labels[1] + "')";
    lines.x_label = "false positive rate";
    lines.y_label = "true positive rate";
    lines.unit_axes = true;
    lines.diagonal = true;
    lines.width = 960;
    for (const auto& r : roc) {
      if (!r.curve) continue;
      lines.lines.push_back({r.feature + " (AUC " + format_significant(r.curve->auc, 3) + ")", r.curve->fpr,
                             r.curve->tpr, r.highlight});
    }
    stage_plot(stage, "roc_curves", lines);
  } else {
    log("outcome is not binary; Mann-Whitney and ROC skipped");
  }

  if (volume) {
    auto va = analysis::volume_analysis(table, *volume, a.corr_threshold, jobs);
    if (va.pr) {
      svg::Plot pr;
      pr.kind = svg::Kind::Line;
      pr.title = "Volume precision-recall";
      pr.x_label = "recall";
      pr.y_label = "precision";
      pr.unit_axes = true;
      pr.width = 720;
      pr.lines.push_back({*volume + " (AP " + format_significant(va.pr->average_precision, 3) + ")", va.pr->recall,
                          va.pr->precision, true});
      stage_plot(stage, "volume_pr", pr);
    }
    auto plot = bar_plot("Absolute Spearman correlation with " + *volume, "|rho|", va.correlations.size());
    plot.threshold = a.corr_threshold;
    for (const auto& c : va.correlations) plot.bars.push_back({c.feature, c.abs_rho, c.highlight});
    stage_plot(stage, "volume_correlation", plot);
  }
  stage.commit();
  log("wrote reports to " + a.out);
  return kOk;
}

// ------------------------------------------------------------ gen-fixtures

struct FixtureArgs {
  std::string kind = "all", out;
  std::uint64_t seed = 0;
};

int do_gen_fixtures(const FixtureArgs& a, const Log& log) {
  auto kind = fixtures::parse_kind(a.kind);
  if (!kind) throw Error(ErrorCode::ConfigInvalid, "kind: expected qc, cohort, features or all");
  auto files = fixtures::generate(*kind, a.seed);
  OutputStage stage(a.out);
  for (const auto& f : files) stage.write(f.relative, f.bytes);
  stage.commit();
  log("wrote " + std::to_string(files.size()) + " files to " + a.out);
  return kOk;
}

int exit_code(ErrorCode code) { return code == ErrorCode::IoFailure ? kIoError : kValidationError; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radiomics dataset toolkit", "radgate"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all");

  DescribeArgs describe;
  auto* c_describe = app.add_subcommand("describe", "Tabulate DICOM metadata");
  c_describe->add_option("--root", describe.root, "Dataset root")->required();
  c_describe->add_option("--mode", describe.mode, "Table layout")->check(CLI::IsMember({"default", "ct"}));
  c_describe->add_option("--out", describe.out, "Output CSV")->required();
  c_describe->add_option("--jobs", describe.jobs, "Worker threads");

  CheckArgs check;
  auto* c_check = app.add_subcommand("check", "Run acquisition quality checks");
  c_check->add_option("--root", check.root, "Dataset root")->required();
  c_check->add_option("--spec", check.spec, "Quality spec JSON")->required();
  c_check->add_option("--out", check.out, "Output CSV")->required();
  c_check->add_option("--jobs", check.jobs, "Worker threads");

  ConvertArgs convert;
  auto* c_convert = app.add_subcommand("convert", "Convert DICOM series and RTSTRUCTs to NRRD");
  c_convert->add_option("--root", convert.root, "Dataset root")->required();
  c_convert->add_option("--out", convert.out, "Output directory")->required();
  c_convert->add_option("--roi", convert.roi, "ROI written as mask.nrrd (default: first)");
  c_convert->add_option("--spec", convert.spec, "Convert only series passing this quality spec");
  c_convert->add_option("--jobs", convert.jobs, "Worker threads");

  PreprocessArgs prep;
  auto* c_prep = app.add_subcommand("preprocess", "Apply a preprocessing chain to NRRD cases");
  c_prep->add_option("--input", prep.input, "NRRD dataset root")->required();
  c_prep->add_option("--params", prep.params, "Preprocessing JSON")->required();
  c_prep->add_option("--out", prep.out, "Output directory")->required();
  c_prep->add_option("--jobs", prep.jobs, "Worker threads");

  UnrollArgs unroll_args;
  auto* c_unroll = app.add_subcommand("unroll", "Export per-slice images with mask outlines");
  c_unroll->add_option("--input", unroll_args.input, "NRRD dataset root")->required();
  c_unroll->add_option("--out", unroll_args.out, "Output directory")->required();
  c_unroll->add_option("--window", unroll_args.window, "LEVEL,WIDTH (default: min-max)");
  c_unroll->add_option("--jobs", unroll_args.jobs, "Worker threads");

  ExtractArgs extract;
  auto* c_extract = app.add_subcommand("extract", "Extract radiomics features");
  c_extract->add_option("--input", extract.input, "NRRD dataset root")->required();
  c_extract->add_option("--params", extract.params, "Extraction JSON")->required();
  c_extract->add_option("--out", extract.out, "Output feature CSV")->required();
  c_extract->add_option("--jobs", extract.jobs, "Worker threads");

  AnalyzeArgs analyze;
  auto* c_analyze = app.add_subcommand("analyze", "Explore features against an outcome");
  c_analyze->add_option("--features", analyze.features, "Feature CSV")->required();
  c_analyze->add_option("--outcome", analyze.outcome, "Outcome column")->required();
  c_analyze->add_option("--patient-column", analyze.patient_column, "Patient id column");
  c_analyze->add_option("--clinical", analyze.clinical, "Clinical CSV joined on the patient column");
  c_analyze->add_option("--include", analyze.include, "Features to keep")->delimiter(',');
  c_analyze->add_option("--exclude", analyze.exclude, "Features to drop")->delimiter(',');
  c_analyze->add_option("--drop-patients", analyze.drop_patients, "Patients to drop")->delimiter(',');
  c_analyze->add_option("--classes", analyze.classes, "Classes shown in distributions")->delimiter(',');
  c_analyze->add_option("--volume", analyze.volume, "Volume feature for volume analysis");
  c_analyze->add_option("--handle-nan", analyze.handle_nan, "patients, features or none");
  c_analyze->add_option("--alpha", analyze.alpha, "Significance level");
  c_analyze->add_option("--auc-threshold", analyze.auc_threshold, "ROC AUC highlight threshold");
  c_analyze->add_option("--corr-threshold", analyze.corr_threshold, "Volume correlation highlight threshold");
  c_analyze->add_option("--out", analyze.out, "Output directory")->required();
  c_analyze->add_option("--jobs", analyze.jobs, "Worker threads");

  FixtureArgs fixture;
  auto* c_fixtures = app.add_subcommand("gen-fixtures", "Write synthetic test datasets");
  c_fixtures->add_option("--kind", fixture.kind, "qc, cohort, features or all");
  c_fixtures->add_option("--seed", fixture.seed, "Random seed");
  c_fixtures->add_option("--out", fixture.out, "Output directory")->required();

  if (!args.empty() && !args[0].empty() && args[0][0] != '-' && !app.get_subcommand_no_throw(args[0])) {
    err << "radgate: " << to_string(ErrorCode::UnknownSubcommand) << ": '" << args[0] << "'\n" << app.help();
    return kValidationError;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << "radgate: " << e.what() << '\n' << sub->help();
    return kValidationError;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  Log log(err, name);
  try {
    if (sub == c_describe) return do_describe(describe, log);
    if (sub == c_check) return do_check(check, log);
    if (sub == c_convert) return do_convert(convert, log);
    if (sub == c_prep) return do_preprocess(prep, log);
    if (sub == c_unroll) return do_unroll(unroll_args, log);
    if (sub == c_extract) return do_extract(extract, log);
    if (sub == c_analyze) return do_analyze(analyze, log);
    if (sub == c_fixtures) return do_gen_fixtures(fixture, log);
  } catch (const Error& e) {
    log(std::string("error: ") + e.what());
    return exit_code(e.code());
  } catch (const fs::filesystem_error& e) {
    log(std::string("error: ") + e.what());
    return kIoError;
  }
  return kValidationError;
}

}  // namespace radgate::cli
