#include "radgate/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "radgate/csv.hpp"
#include "radgate/error.hpp"
#include "radgate/numfmt.hpp"

namespace radgate::preprocess {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void degenerate(std::string_view what) {
  throw Error(ErrorCode::DegenerateIntensity, std::string(what));
}

std::pair<double, double> value_range(const Volume& v, const Mask* scope = nullptr) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  auto voxels = v.voxels();
  for (std::size_t i = 0; i < voxels.size(); ++i) {
    if (scope && !scope->voxels()[i]) continue;
    lo = std::min(lo, voxels[i]);
    hi = std::max(hi, voxels[i]);
  }
  if (lo > hi) throw Error(ErrorCode::EmptyMask, "scope mask has no voxels");
  return {lo, hi};
}

void require_scope(const Volume& v, const Mask* scope) {
  if (scope && !(scope->geometry() == v.geometry()))
    throw Error(ErrorCode::GeometryMismatch, "scope mask geometry differs from the volume");
}

Volume with_voxels(const Volume& v, std::vector<double> voxels, PixelType type = PixelType::Float64) {
  return Volume(v.geometry(), std::move(voxels), type, v.intensity_unit());
}

std::size_t bin_of(double x, double lo, double hi, std::size_t bins) {
  double t = (x - lo) / (hi - lo) * static_cast<double>(bins);
  auto b = static_cast<std::size_t>(std::max(0.0, std::floor(t)));
  return std::min(b, bins - 1);
}

std::vector<double> cdf(std::span<const double> voxels, double lo, double hi, std::size_t bins) {
  std::vector<double> counts(bins, 0.0);
  for (double x : voxels) counts[bin_of(x, lo, hi, bins)] += 1.0;
  double total = static_cast<double>(voxels.size());
  double running = 0.0;
  for (auto& c : counts) {
    running += c;
    c = running / total;
  }
  counts.back() = 1.0;
  return counts;
}

std::string fmt(double v) { return format_shortest(v); }

}  // namespace

std::string_view step_name(const Step& step) {
  return std::visit(overloaded{
                        [](const Rescale&) { return std::string_view("rescale"); },
                        [](const ZScore&) { return std::string_view("zscore"); },
                        [](const HistMatch&) { return std::string_view("hist_match"); },
                        [](const HistEqualize&) { return std::string_view("hist_equalize"); },
                        [](const IntensityResample&) { return std::string_view("intensity_resample"); },
                        [](const Reshape&) { return std::string_view("reshape"); },
                        [](const BiasFieldCorrection&) { return std::string_view("n4_bias_field"); },
                    },
                    step);
}

std::string step_parameters(const Step& step) {
  return std::visit(
      overloaded{
          [](const Rescale& s) { return "out_min=" + fmt(s.out_min) + ";out_max=" + fmt(s.out_max); },
          [](const ZScore& s) { return std::string("scope=") + (s.scope == Scope::Whole ? "whole" : "roi"); },
          [](const HistMatch& s) { return "reference=" + s.reference_id + ";levels=" + std::to_string(s.levels); },
          [](const HistEqualize& s) { return "bins=" + std::to_string(s.bins); },
          [](const IntensityResample& s) {
            return (s.mode == BinMode::FixedBinCount ? "bin_count=" : "bin_width=") + fmt(s.value);
          },
          [](const Reshape& s) {
            std::string out;
            if (s.spacing)
              out = "spacing=" + fmt((*s.spacing)[0]) + "x" + fmt((*s.spacing)[1]) + "x" + fmt((*s.spacing)[2]);
            else if (s.dims)
              out = "dims=" + std::to_string((*s.dims)[0]) + "x" + std::to_string((*s.dims)[1]) + "x" +
                    std::to_string((*s.dims)[2]);
            return out + ";interpolation=" + (s.interpolation == Interpolation::Trilinear ? "trilinear" : "nearest");
          },
          [](const BiasFieldCorrection&) { return std::string(); },
      },
      step);
}

void validate(const Step& step) {
  auto bad = [](const std::string& why) { throw Error(ErrorCode::InvalidParameter, why); };
  std::visit(overloaded{
                 [&](const Rescale& s) {
                   if (!(s.out_min < s.out_max)) bad("rescale: out_min must be below out_max");
                 },
                 [](const ZScore&) {},
                 [&](const HistMatch& s) {
                   if (s.levels < 2) bad("hist_match: levels must be at least 2");
                   if (!s.reference) bad("hist_match: reference volume required");
                 },
                 [&](const HistEqualize& s) {
                   if (s.bins < 2) bad("hist_equalize: bins must be at least 2");
                 },
                 [&](const IntensityResample& s) {
                   if (s.mode == BinMode::FixedBinCount && !(s.value >= 2 && s.value == std::floor(s.value)))
                     bad("intensity_resample: bin count must be an integer >= 2");
                   if (s.mode == BinMode::FixedBinWidth && !(s.value > 0)) bad("intensity_resample: bin width must be > 0");
                 },
                 [&](const Reshape& s) {
                   if (s.spacing.has_value() == s.dims.has_value()) bad("reshape: exactly one of spacing or dims");
                   if (s.spacing)
                     for (double v : *s.spacing)
                       if (!(v > 0)) bad("reshape: target spacing must be > 0");
                   if (s.dims)
                     for (auto d : *s.dims)
                       if (d < 1) bad("reshape: target dims must be >= 1");
                 },
                 [](const BiasFieldCorrection&) {},
             },
             step);
}

Volume rescale(const Volume& v, double out_min, double out_max) {
  validate(Step{Rescale{out_min, out_max}});
  auto [lo, hi] = value_range(v);
  if (!(hi > lo)) degenerate("rescale of a constant volume");
  std::vector<double> out(v.voxels().size());
  double scale = (out_max - out_min) / (hi - lo);
  std::transform(v.voxels().begin(), v.voxels().end(), out.begin(),
                 [&](double x) { return x == hi ? out_max : out_min + (x - lo) * scale; });
  return with_voxels(v, std::move(out));
}

Volume zscore(const Volume& v, const Mask* scope) {
  require_scope(v, scope);
  auto s = intensity_stats(v, scope);
  if (s.count == 0) throw Error(ErrorCode::EmptyMask, "zscore scope has no voxels");
  if (!(s.std > 0)) degenerate("zscore over a constant scope");
  std::vector<double> out(v.voxels().size());
  std::transform(v.voxels().begin(), v.voxels().end(), out.begin(), [&](double x) { return (x - s.mean) / s.std; });
  return with_voxels(v, std::move(out));
}

Volume hist_match(const Volume& v, const Volume& reference, std::size_t levels) {
  if (levels < 2) throw Error(ErrorCode::InvalidParameter, "hist_match: levels must be at least 2");
  auto [slo, shi] = value_range(v);
  auto [rlo, rhi] = value_range(reference);
  if (!(shi > slo)) degenerate("hist_match source is constant");
  if (!(rhi > rlo)) degenerate("hist_match reference is constant");

  auto source_cdf = cdf(v.voxels(), slo, shi, levels);
  auto reference_cdf = cdf(reference.voxels(), rlo, rhi, levels);
  const double ref_width = (rhi - rlo) / static_cast<double>(levels);

  const double src_width = (shi - slo) / static_cast<double>(levels);

  // Source CDF and inverse reference CDF, both linear inside a bin.
  auto match = [&](double x) {
    std::size_t b = bin_of(x, slo, shi, levels);
    double start = b == 0 ? 0.0 : source_cdf[b - 1];
    double t = std::clamp((x - slo) / src_width - static_cast<double>(b), 0.0, 1.0);
    double q = start + (source_cdf[b] - start) * t;
    auto it = std::lower_bound(reference_cdf.begin(), reference_cdf.end(), q);
    std::size_t c = it == reference_cdf.end() ? levels - 1 : static_cast<std::size_t>(it - reference_cdf.begin());
    double below = c == 0 ? 0.0 : reference_cdf[c - 1];
    double span = reference_cdf[c] - below;
    double frac = span > 0 ? std::clamp((q - below) / span, 0.0, 1.0) : 1.0;
    return rlo + ref_width * (static_cast<double>(c) + frac);
  };
  std::vector<double> out(v.voxels().size());
  std::transform(v.voxels().begin(), v.voxels().end(), out.begin(), match);
  return with_voxels(v, std::move(out));
}

Volume hist_equalize(const Volume& v, std::size_t bins) {
  if (bins < 2) throw Error(ErrorCode::InvalidParameter, "hist_equalize: bins must be at least 2");
  auto [lo, hi] = value_range(v);
  if (!(hi > lo)) degenerate("hist_equalize of a constant volume");
  auto c = cdf(v.voxels(), lo, hi, bins);
  std::vector<double> out(v.voxels().size());
  std::transform(v.voxels().begin(), v.voxels().end(), out.begin(),
                 [&](double x) { return lo + c[bin_of(x, lo, hi, bins)] * (hi - lo); });
  return with_voxels(v, std::move(out));
}

Volume intensity_resample(const Volume& v, BinMode mode, double value, const Mask* scope) {
  validate(Step{IntensityResample{mode, value}});
  require_scope(v, scope);
  auto [lo, hi] = value_range(v, scope);
  std::vector<double> out(v.voxels().size());
  double top = 1;
  if (mode == BinMode::FixedBinCount) {
    if (!(hi > lo)) degenerate("fixed bin count discretization of a constant volume");
    const double n = value;
    std::transform(v.voxels().begin(), v.voxels().end(), out.begin(), [&](double x) {
      return std::clamp(std::floor(n * (x - lo) / (hi - lo)) + 1.0, 1.0, n);
    });
    top = n;
  } else {
    std::transform(v.voxels().begin(), v.voxels().end(), out.begin(),
                   [&](double x) { return std::max(1.0, std::floor((x - lo) / value) + 1.0); });
    top = *std::max_element(out.begin(), out.end());
  }
  PixelType type = top <= 32767 ? PixelType::Int16 : PixelType::Int32;
  return with_voxels(v, std::move(out), type);
}

Geometry reshape_geometry(const Geometry& g, const Reshape& target) {
  validate(Step{target});
  Geometry out = g;
  for (int a = 0; a < 3; ++a) {
    if (target.spacing) {
      out.spacing[a] = (*target.spacing)[a];
      double n = std::round(static_cast<double>(g.dims[a]) * g.spacing[a] / out.spacing[a]);
      out.dims[a] = static_cast<std::size_t>(std::max(1.0, n));
    } else {
      out.dims[a] = (*target.dims)[a];
      out.spacing[a] = static_cast<double>(g.dims[a]) * g.spacing[a] / static_cast<double>(out.dims[a]);
    }
  }
  return out;
}

namespace {

struct AxisSamples {
  std::vector<std::size_t> lower, upper, nearest;
  std::vector<double> weight;  // weight of `upper`
};

AxisSamples axis_samples(std::size_t n_in, double s_in, std::size_t n_out, double s_out) {
  AxisSamples a;
  for (std::size_t o = 0; o < n_out; ++o) {
    double c = static_cast<double>(o) * s_out / s_in;
    c = std::clamp(c, 0.0, static_cast<double>(n_in - 1));
    auto lo = static_cast<std::size_t>(std::floor(c));
    a.lower.push_back(lo);
    a.upper.push_back(std::min(lo + 1, n_in - 1));
    a.weight.push_back(c - static_cast<double>(lo));
    a.nearest.push_back(std::min(static_cast<std::size_t>(std::floor(c + 0.5)), n_in - 1));
  }
  return a;
}

template <typename Sample>
void resample_grid(const Geometry& in, const Geometry& out, Interpolation interp, Sample&& sample_into) {
  std::array<AxisSamples, 3> ax;
  for (int a = 0; a < 3; ++a) ax[a] = axis_samples(in.dims[a], in.spacing[a], out.dims[a], out.spacing[a]);
  for (std::size_t k = 0; k < out.dims[2]; ++k)
    for (std::size_t j = 0; j < out.dims[1]; ++j)
      for (std::size_t i = 0; i < out.dims[0]; ++i) {
        std::size_t dst = out.offset(i, j, k);
        if (interp == Interpolation::Nearest) {
          sample_into(dst, in.offset(ax[0].nearest[i], ax[1].nearest[j], ax[2].nearest[k]));
          continue;
        }
        sample_into(dst, ax[0], ax[1], ax[2], i, j, k);
      }
}

}  // namespace

Volume reshape(const Volume& v, const Reshape& target) {
  const Geometry& in = v.geometry();
  Geometry out = reshape_geometry(in, target);
  std::vector<double> voxels(out.voxel_count());
  auto src = v.voxels();
  resample_grid(in, out, target.interpolation,
                overloaded{
                    [&](std::size_t dst, std::size_t from) { voxels[dst] = src[from]; },
                    [&](std::size_t dst, const AxisSamples& x, const AxisSamples& y, const AxisSamples& z,
                        std::size_t i, std::size_t j, std::size_t k) {
                      double tx = x.weight[i], ty = y.weight[j], tz = z.weight[k];
                      auto at = [&](std::size_t a, std::size_t b, std::size_t c) { return src[in.offset(a, b, c)]; };
                      auto lerp = [](double p, double q, double t) { return t == 0.0 ? p : p * (1.0 - t) + q * t; };
                      double c00 = lerp(at(x.lower[i], y.lower[j], z.lower[k]), at(x.upper[i], y.lower[j], z.lower[k]), tx);
                      double c10 = lerp(at(x.lower[i], y.upper[j], z.lower[k]), at(x.upper[i], y.upper[j], z.lower[k]), tx);
                      double c01 = lerp(at(x.lower[i], y.lower[j], z.upper[k]), at(x.upper[i], y.lower[j], z.upper[k]), tx);
                      double c11 = lerp(at(x.lower[i], y.upper[j], z.upper[k]), at(x.upper[i], y.upper[j], z.upper[k]), tx);
                      voxels[dst] = lerp(lerp(c00, c10, ty), lerp(c01, c11, ty), tz);
                    },
                });
  PixelType type = target.interpolation == Interpolation::Nearest ? v.pixel_type() : PixelType::Float64;
  return Volume(out, std::move(voxels), type, v.intensity_unit());
}

Mask reshape(const Mask& m, const Reshape& target) {
  Reshape nearest = target;
  nearest.interpolation = Interpolation::Nearest;
  const Geometry& in = m.geometry();
  Geometry out = reshape_geometry(in, nearest);
  std::vector<std::uint8_t> voxels(out.voxel_count());
  auto src = m.voxels();
  resample_grid(in, out, Interpolation::Nearest,
                overloaded{
                    [&](std::size_t dst, std::size_t from) { voxels[dst] = src[from]; },
                    [](std::size_t, const AxisSamples&, const AxisSamples&, const AxisSamples&, std::size_t,
                       std::size_t, std::size_t) {},
                });
  return Mask(out, std::move(voxels));
}

ChainResult run_chain(const Volume& v, const PreprocessParams& params, const Mask* mask) {
  if (mask) require_scope(v, mask);
  ChainResult result{v, mask ? std::optional<Mask>(*mask) : std::nullopt, {}};
  for (std::size_t s = 0; s < params.steps.size(); ++s) {
    const Step& step = params.steps[s];
    const Mask* roi = result.mask ? &*result.mask : nullptr;
    try {
      validate(step);
      bool roi_scope = std::holds_alternative<ZScore>(step) && std::get<ZScore>(step).scope == Scope::Roi;
      if (roi_scope && !roi) throw Error(ErrorCode::InvalidParameter, "zscore scope 'roi' needs a mask");
      const Mask* stats_scope = roi_scope ? roi : nullptr;

      StepStats stats;
      stats.index = s + 1;
      stats.step = std::string(step_name(step));
      stats.parameters = step_parameters(step);
      stats.input = intensity_stats(result.volume, stats_scope);

      Volume next = std::visit(
          overloaded{
              [&](const Rescale& p) { return rescale(result.volume, p.out_min, p.out_max); },
              [&](const ZScore& p) { return zscore(result.volume, p.scope == Scope::Roi ? roi : nullptr); },
              [&](const HistMatch& p) { return hist_match(result.volume, *p.reference, p.levels); },
              [&](const HistEqualize& p) { return hist_equalize(result.volume, p.bins); },
              [&](const IntensityResample& p) { return intensity_resample(result.volume, p.mode, p.value); },
              [&](const Reshape& p) { return reshape(result.volume, p); },
              [&](const BiasFieldCorrection&) -> Volume {
                throw Error(ErrorCode::NotImplemented, "N4 bias field correction is not available");
              },
          },
          step);
      if (const auto* r = std::get_if<Reshape>(&step); r && result.mask) result.mask = reshape(*result.mask, *r);
      result.volume = std::move(next);
      stats.output = intensity_stats(result.volume, roi_scope ? &*result.mask : nullptr);
      result.stats.push_back(std::move(stats));
    } catch (const StepError&) {
      throw;
    } catch (const Error& e) {
      throw StepError(e, s + 1, step_name(step));
    }
  }
  return result;
}

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::ConfigInvalid, field + ": " + why);
}

double number(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key) || !obj[key].is_number()) invalid(path + "." + key, "expected a number");
  return obj[key].get<double>();
}

std::size_t count(const json& obj, const char* key, const std::string& path, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_unsigned()) invalid(path + "." + key, "expected a non-negative integer");
  return obj[key].get<std::size_t>();
}

void only_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& path) {
  for (const auto& [k, _] : obj.items()) {
    bool known = k == "step";
    for (const char* allowed : keys) known = known || k == allowed;
    if (!known) invalid(path + "." + k, "unknown field");
  }
}

}  // namespace

PreprocessParams parse_params(std::string_view text, const std::function<Volume(const std::string&)>& load_reference) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid("<document>", e.what());
  }
  if (!doc.is_object() || !doc.contains("steps") || !doc["steps"].is_array())
    invalid("steps", "expected an array of step objects");
  for (const auto& [k, _] : doc.items())
    if (k != "steps") invalid(k, "unknown field");

  PreprocessParams params;
  std::size_t index = 0;
  for (const auto& item : doc["steps"]) {
    std::string path = "steps[" + std::to_string(index++) + "]";
    if (!item.is_object() || !item.contains("step") || !item["step"].is_string())
      invalid(path + ".step", "expected a step name");
    std::string name = item["step"].get<std::string>();
    Step step;
    if (name == "rescale") {
      only_keys(item, {"out_min", "out_max"}, path);
      step = Rescale{number(item, "out_min", path), number(item, "out_max", path)};
    } else if (name == "zscore") {
      only_keys(item, {"scope"}, path);
      ZScore z;
      if (item.contains("scope")) {
        std::string scope = item["scope"].is_string() ? item["scope"].get<std::string>() : "";
        if (scope == "roi")
          z.scope = Scope::Roi;
        else if (scope != "whole")
          invalid(path + ".scope", "expected \"whole\" or \"roi\"");
      }
      step = z;
    } else if (name == "hist_match") {
      only_keys(item, {"reference", "levels"}, path);
      if (!item.contains("reference") || !item["reference"].is_string())
        invalid(path + ".reference", "expected a reference volume path");
      HistMatch h;
      h.reference_id = item["reference"].get<std::string>();
      h.levels = count(item, "levels", path, kDefaultMatchLevels);
      if (!load_reference) invalid(path + ".reference", "no reference loader available");
      h.reference = std::make_shared<const Volume>(load_reference(h.reference_id));
      step = h;
    } else if (name == "hist_equalize") {
      only_keys(item, {"bins"}, path);
      step = HistEqualize{count(item, "bins", path, 256)};
    } else if (name == "intensity_resample") {
      only_keys(item, {"bin_count", "bin_width"}, path);
      bool has_count = item.contains("bin_count"), has_width = item.contains("bin_width");
      if (has_count == has_width) invalid(path, "exactly one of bin_count or bin_width");
      step = has_count ? IntensityResample{BinMode::FixedBinCount, number(item, "bin_count", path)}
                       : IntensityResample{BinMode::FixedBinWidth, number(item, "bin_width", path)};
    } else if (name == "reshape") {
      only_keys(item, {"spacing", "dims", "interpolation"}, path);
      Reshape r;
      if (item.contains("spacing")) {
        const auto& s = item["spacing"];
        if (!s.is_array() || s.size() != 3) invalid(path + ".spacing", "expected [sx, sy, sz]");
        r.spacing = Vec3{s[0].get<double>(), s[1].get<double>(), s[2].get<double>()};
      }
      if (item.contains("dims")) {
        const auto& d = item["dims"];
        if (!d.is_array() || d.size() != 3 || !d[0].is_number_unsigned() || !d[1].is_number_unsigned() ||
            !d[2].is_number_unsigned())
          invalid(path + ".dims", "expected [nx, ny, nz]");
        r.dims = Dims{d[0].get<std::size_t>(), d[1].get<std::size_t>(), d[2].get<std::size_t>()};
      }
      if (item.contains("interpolation")) {
        std::string interp = item["interpolation"].is_string() ? item["interpolation"].get<std::string>() : "";
        if (interp == "nearest")
          r.interpolation = Interpolation::Nearest;
        else if (interp != "trilinear")
          invalid(path + ".interpolation", "expected \"trilinear\" or \"nearest\"");
      }
      step = r;
    } else if (name == "n4_bias_field") {
      only_keys(item, {}, path);
      step = BiasFieldCorrection{};
    } else {
      invalid(path + ".step", "unknown step '" + name + "'");
    }
    try {
      validate(step);
    } catch (const Error& e) {
      invalid(path, e.what());
    }
    params.steps.push_back(std::move(step));
  }
  return params;
}

std::string stats_csv(std::string_view patient_id, const std::vector<StepStats>& stats, bool with_header) {
  CsvWriter w;
  if (with_header)
    w.row({"patient", "step_index", "step", "parameters", "in_min", "in_max", "in_mean", "in_std", "out_min",
           "out_max", "out_mean", "out_std"});
  for (const auto& s : stats)
    w.row({std::string(patient_id), std::to_string(s.index), s.step, s.parameters, fmt(s.input.min),
           fmt(s.input.max), fmt(s.input.mean), fmt(s.input.std), fmt(s.output.min), fmt(s.output.max),
           fmt(s.output.mean), fmt(s.output.std)});
  return w.str();
}

}  // namespace radgate::preprocess
