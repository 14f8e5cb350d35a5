#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "elasticlane/dataio.hpp"
#include "elasticlane/elm.hpp"
#include "elasticlane/energy.hpp"
#include "elasticlane/error.hpp"
#include "elasticlane/evolve.hpp"
#include "elasticlane/field.hpp"
#include "elasticlane/metrics.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace elasticlane::cli {

namespace {

/// Unreadable input or unusable output location.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Input file that failed to parse; carries the file name for diagnostics.
class FileParseError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string grid = "100x36";
  std::optional<double> sigma;
  double alpha = 0.5;
  std::optional<double> step;
  int max_steps = 5000;
  std::string mode = "implicit";
  std::string sampling = "bilinear";
  double iou_thresh = 0.5;
  int width_px = 30;
  double x_thresh = 20.0;
  double match_frac = 0.85;
  std::uint64_t seed = 0;
  std::string out;
  int reinit_every = 0;
  int record_every = 1;
  int capacity = 4;
  std::string image;

  std::string labels;
  std::string gt;
  std::string init;
  std::optional<double> gt_x;
  std::optional<double> offset;
  int lane = 0;
  bool snapshots = false;

  std::string pred_dir;
  std::string gt_dir;
  std::string metric = "culane";
  std::string per_image;

  std::string dft_size = "8x8";
  std::string fd_size = "16x16";
  int dft_trials = 100;
  int fd_trials = 20;
  bool corrupt_kernel = false;
};

std::pair<int, int> parse_dims(const std::string& text, const char* flag) {
  const auto sep = text.find_first_of("xX");
  int w = 0;
  int h = 0;
  if (sep != std::string::npos) {
    try {
      std::size_t used_w = 0;
      std::size_t used_h = 0;
      w = std::stoi(text.substr(0, sep), &used_w);
      h = std::stoi(text.substr(sep + 1), &used_h);
      if (used_w != sep || used_h != text.size() - sep - 1) w = h = 0;
    } catch (const std::exception&) {
      w = h = 0;
    }
  }
  if (w <= 0 || h <= 0) {
    throw InvalidArgument(std::string(flag) + ": expected WxH, got '" + text + "'");
  }
  return {w, h};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw IoError("cannot write " + path.string());
}

AnnotationRecord load_annotation(const fs::path& path) {
  try {
    return parse_culane_lines(read_file(path), path.filename().string());
  } catch (const ParseError& e) {
    throw FileParseError(path.string() + ":" + e.what());
  }
}

std::vector<int> all_rows(int height) {
  std::vector<int> rows(height);
  for (int r = 0; r < height; ++r) rows[r] = r;
  return rows;
}

struct GridSetup {
  GridShape shape;
  HeavisideParams hp;
  double sx = 1.0;
  double sy = 1.0;
};

GridSetup grid_setup(const Options& o) {
  const auto [w, h] = parse_dims(o.grid, "--grid");
  GridShape shape(w, h);
  HeavisideParams hp(o.sigma.value_or(default_sigma_for_rows(h)));
  GridSetup g{shape, hp};
  if (!o.image.empty()) {
    const auto [iw, ih] = parse_dims(o.image, "--image");
    g.sx = static_cast<double>(w) / iw;
    g.sy = static_cast<double>(h) / ih;
  }
  return g;
}

std::vector<LanePolyline> grid_lanes(const AnnotationRecord& rec, const GridSetup& g) {
  std::vector<LanePolyline> lanes;
  const auto rows = all_rows(g.shape.height());
  for (const auto& lane : rec.lanes) lanes.push_back(to_polyline(lane, rows, g.sx, g.sy));
  return lanes;
}

/// Lane in left-to-right slot `slot` of a label file.
LanePolyline lane_from_file(const std::string& path, int slot, const GridSetup& g, int capacity) {
  const auto lanes = grid_lanes(load_annotation(path), g);
  const auto stack = order_and_pad(lanes, std::max(capacity, static_cast<int>(lanes.size())),
                                   g.shape, g.hp);
  if (slot < 0 || slot >= stack.count()) {
    throw InvalidArgument(path + ": no lane in slot " + std::to_string(slot));
  }
  return lanes[stack.source_index[slot]];
}

LanePolyline shifted(LanePolyline lane, double dx) {
  for (auto& x : lane.xs) x += dx;
  return lane;
}

EvolutionConfig evolution_config(const Options& o, const GridSetup& g) {
  EvolutionConfig cfg;
  if (o.mode == "implicit") {
    cfg.mode = EvolutionMode::Implicit;
  } else if (o.mode == "explicit") {
    cfg.mode = EvolutionMode::Explicit;
  } else {
    throw InvalidArgument("--mode must be implicit or explicit");
  }
  if (o.sampling == "bilinear") {
    cfg.sampling = VelocitySampling::Bilinear;
  } else if (o.sampling == "delta") {
    cfg.sampling = VelocitySampling::DeltaWeighted;
  } else {
    throw InvalidArgument("--sampling must be bilinear or delta");
  }
  cfg.alpha = o.alpha;
  cfg.sigma = g.hp.sigma;
  cfg.max_steps = o.max_steps;
  cfg.reinit_every = o.reinit_every;
  cfg.record_every = o.record_every;
  if (o.step) {
    cfg.step_size = *o.step;
  } else if (cfg.mode == EvolutionMode::Implicit) {
    cfg.step_size = 0.9 * stable_step_size(g.shape, o.alpha);
  } else {
    cfg.step_size = 1.0;
  }
  cfg.validate();
  return cfg;
}

int cmd_encode(const Options& o, std::ostream& out) {
  const auto g = grid_setup(o);
  if (o.capacity < 1) throw InvalidArgument("--capacity must be >= 1");
  const auto lanes = grid_lanes(load_annotation(o.labels), g);
  const auto stack = order_and_pad(lanes, o.capacity, g.shape, g.hp);

  ordered_json manifest;
  manifest["grid"] = {{"width", g.shape.width()}, {"height", g.shape.height()}};
  manifest["sigma"] = g.hp.sigma;
  manifest["capacity"] = stack.capacity;
  manifest["exists"] = stack.exists;
  ordered_json slots = ordered_json::array();
  for (int s = 0; s < stack.capacity; ++s) {
    ordered_json slot;
    slot["slot"] = s;
    slot["exists"] = static_cast<bool>(stack.exists[s]);
    slot["source_index"] = stack.source_index[s];
    std::vector<int> range;
    for (bool b : stack.ranges[s].rows) range.push_back(b ? 1 : 0);
    slot["range"] = range;
    if (stack.exists[s]) {
      slot["file"] = "lane_" + std::to_string(s) + ".pgm";
    } else {
      slot["file"] = nullptr;
    }
    slots.push_back(slot);
  }
  manifest["slots"] = slots;

  if (!o.out.empty()) {
    const fs::path dir(o.out);
    for (int s = 0; s < stack.count(); ++s) {
      write_file(dir / ("lane_" + std::to_string(s) + ".pgm"), write_field_pgm(stack.fields[s]));
    }
    write_file(dir / "manifest.json", write_report_json(manifest));
  }
  out << write_report_json(manifest);
  return kOk;
}

int cmd_evolve(const Options& o, std::ostream& out) {
  const auto g = grid_setup(o);
  auto cfg = evolution_config(o, g);
  cfg.keep_snapshots = o.snapshots && !o.out.empty();

  const LanePolyline gt = o.gt.empty() ? LanePolyline::vertical(o.gt_x.value_or(40.0), g.shape.height())
                                       : lane_from_file(o.gt, o.lane, g, o.capacity);
  const LanePolyline init = o.init.empty() ? shifted(gt, o.offset.value_or(-20.0))
                                           : lane_from_file(o.init, o.lane, g, o.capacity);

  EvolutionTrace trace;
  if (cfg.mode == EvolutionMode::Implicit) {
    const auto gt_enc = encode_lane(gt, g.shape, g.hp);
    const auto psi0 = encode_lane(init, g.shape, g.hp).psi;
    trace = evolve_implicit(psi0, gt_enc.psi, gt_enc.range, cfg);
  } else {
    trace = evolve_explicit(init, gt, g.shape, cfg);
  }

  const auto summary = write_report_json(summarize(trace));
  if (!o.out.empty()) {
    const fs::path dir(o.out);
    write_file(dir / "trace.csv", write_trace_csv(trace));
    write_file(dir / "summary.json", summary);
    for (std::size_t i = 0; i < trace.field_snapshots.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "step_%06d.pgm", trace.steps[i]);
      write_file(dir / "snapshots" / name, write_field_pgm(trace.field_snapshots[i]));
    }
  }
  out << summary;
  return kOk;
}

std::vector<fs::path> annotation_files(const fs::path& root) {
  if (!fs::is_directory(root)) throw IoError("not a directory: " + root.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(fs::relative(entry.path(), root));
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

/// Union of annotated rows over the ground-truth lanes (TuSimple h_samples).
std::vector<int> annotated_rows(const AnnotationRecord& rec) {
  std::vector<int> rows;
  for (const auto& lane : rec.lanes) {
    for (const auto& p : lane) rows.push_back(static_cast<int>(std::lround(p.y)));
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const bool tusimple = o.metric == "tusimple";
  if (!tusimple && o.metric != "culane") throw InvalidArgument("--metric must be culane or tusimple");
  if (!(o.iou_thresh >= 0.0 && o.iou_thresh <= 1.0)) throw InvalidArgument("--iou-thresh must lie in [0,1]");
  if (o.width_px < 1) throw InvalidArgument("--width-px must be >= 1");
  if (!(o.x_thresh > 0.0)) throw InvalidArgument("--x-thresh must be > 0");
  ImageSize image;
  if (!tusimple) {
    if (o.image.empty()) throw InvalidArgument("--image WxH is required for culane scoring");
    const auto [iw, ih] = parse_dims(o.image, "--image");
    image = {iw, ih};
  }

  const fs::path pred_root(o.pred_dir);
  const fs::path gt_root(o.gt_dir);
  if (!fs::is_directory(pred_root)) throw IoError("not a directory: " + pred_root.string());
  const auto files = annotation_files(gt_root);

  DetectionMetrics culane_total;
  TuSimpleMetrics tusimple_total;
  std::string per_image = tusimple ? "image,acc,fp_rate,fn_rate\n" : "image,tp,fp,fn,precision,recall,f1\n";
  for (const auto& rel : files) {
    const fs::path pred_path = pred_root / rel;
    if (!fs::exists(pred_path)) throw IoError("missing prediction file: " + rel.generic_string());
    const auto gt_rec = load_annotation(gt_root / rel);
    const auto pred_rec = load_annotation(pred_path);

    LaneSet gts;
    LaneSet preds;
    gts.image = preds.image = image;
    gts.category = preds.category = rel.parent_path().generic_string();
    const auto rows = tusimple ? annotated_rows(gt_rec) : all_rows(image.height);
    for (const auto& l : gt_rec.lanes) gts.lanes.push_back(to_polyline(l, rows));
    for (const auto& l : pred_rec.lanes) preds.lanes.push_back(to_polyline(l, rows));

    if (tusimple) {
      const auto m = tusimple_score(preds, gts, o.x_thresh, o.match_frac);
      tusimple_total += m;
      per_image += rel.generic_string() + "," + format_double(m.acc) + "," + format_double(m.fp_rate) +
                   "," + format_double(m.fn_rate) + "\n";
    } else {
      const auto m = match_and_score(preds, gts, o.iou_thresh, o.width_px);
      culane_total += m;
      per_image += rel.generic_string() + "," + std::to_string(m.tp) + "," + std::to_string(m.fp) + "," +
                   std::to_string(m.fn) + "," + format_double(m.precision) + "," +
                   format_double(m.recall) + "," + format_double(m.f1) + "\n";
    }
  }

  if (!o.per_image.empty()) write_file(o.per_image, per_image);
  out << (tusimple ? write_report_json(tusimple_total) : write_report_json(culane_total));
  return kOk;
}

int cmd_gradcheck(const Options& o, std::ostream& out) {
  const auto [dw, dh] = parse_dims(o.dft_size, "--dft-size");
  const auto [fw, fh] = parse_dims(o.fd_size, "--fd-size");
  if (o.dft_trials < 1 || o.fd_trials < 1) throw InvalidArgument("trial counts must be >= 1");
  const GridShape dft_shape(dw, dh);
  const GridShape fd_shape(fw, fh);

  double dft_err = 0.0;
  double idft_err = 0.0;
  double roundtrip_err = 0.0;
  for (int k = 0; k < o.dft_trials; ++k) {
    const auto f = oracle::random_field(dft_shape, o.seed * 1000003ULL + static_cast<std::uint64_t>(k));
    const auto spec = dft_forward(f);
    const auto ref = oracle::naive_dft(f);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      dft_err = std::max(dft_err, std::abs(spec.coefficients()[i] - ref[i]));
    }
    const auto back = dft_inverse(spec);
    const auto naive_back = oracle::naive_idft(dft_shape, ref);
    for (std::size_t i = 0; i < f.values().size(); ++i) {
      roundtrip_err = std::max(roundtrip_err, std::abs(back.values()[i] - f.values()[i]));
      idft_err = std::max(idft_err, std::abs(back.values()[i] - naive_back.values()[i]));
    }
  }

  // The hook squares the kernel: still a valid spectral operator, but no
  // longer the gradient of the energy.
  std::optional<FrequencyKernel> kernel;
  if (o.corrupt_kernel) {
    const auto k = frequency_kernel(fd_shape);
    std::vector<double> mags(k.magnitudes().begin(), k.magnitudes().end());
    for (auto& m : mags) m *= m;
    kernel.emplace(fd_shape, std::move(mags));
  }
  const double expected = exact_gradient_scale(fd_shape);
  double min_cos = 1.0;
  double scale_min = 0.0;
  double scale_max = 0.0;
  double scale_dev = 0.0;
  for (int k = 0; k < o.fd_trials; ++k) {
    const auto d = oracle::random_field(fd_shape, o.seed * 1000003ULL + 500009ULL + static_cast<std::uint64_t>(k));
    const auto fd = oracle::fd_energy_gradient(d);
    const auto grad = kernel ? eie_gradient(d, *kernel) : eie_gradient(d);
    const double c = oracle::cosine(fd, grad);
    const double s = oracle::fitted_scale(fd, grad);
    min_cos = std::min(min_cos, c);
    scale_min = k == 0 ? s : std::min(scale_min, s);
    scale_max = k == 0 ? s : std::max(scale_max, s);
    scale_dev = std::max(scale_dev, std::abs(s - expected) / expected);
  }

  const bool pass = dft_err < 1e-9 && idft_err < 1e-9 && roundtrip_err < 1e-12 &&
                    min_cos > 1.0 - 1e-6 && scale_dev < 1e-6;
  ordered_json report;
  report["seed"] = o.seed;
  report["dft"] = {{"size", {dw, dh}},
                   {"trials", o.dft_trials},
                   {"max_abs_error", dft_err},
                   {"inverse_max_abs_error", idft_err},
                   {"roundtrip_max_abs_error", roundtrip_err}};
  report["gradient"] = {{"size", {fw, fh}},
                        {"trials", o.fd_trials},
                        {"min_cosine", min_cos},
                        {"scale_expected", expected},
                        {"scale_min", scale_min},
                        {"scale_max", scale_max},
                        {"scale_max_rel_dev", scale_dev}};
  report["pass"] = pass;
  out << write_report_json(report);
  return pass ? kOk : kCheckFailed;
}

ordered_json trace_summary(const EvolutionTrace& t) {
  auto j = report_object(summarize(t));
  j["initial_energy"] = t.size() > 0 ? t.energies.front() : 0.0;
  j["recorded"] = t.size();
  return j;
}

int cmd_losscmp(const Options& o, std::ostream& out) {
  const auto g = grid_setup(o);
  auto cfg = evolution_config(o, g);
  cfg.mode = EvolutionMode::Implicit;
  const double sigma = g.hp.sigma;
  const double offset = o.offset.value_or(-10.0 * sigma);

  LanePolyline gt;
  if (!o.gt.empty()) {
    gt = lane_from_file(o.gt, o.lane, g, o.capacity);
  } else {
    // Centre the pair in the grid by default.
    gt = LanePolyline::vertical(o.gt_x.value_or(0.5 * (g.shape.width() - 1) - 0.5 * offset),
                                g.shape.height());
  }
  const auto init = shifted(gt, offset);

  const auto gt_enc = encode_lane(gt, g.shape, g.hp);
  const auto phi0 = build_level_set(init, g.shape);
  const auto psi0 = psi_from_level_set(phi0, g.hp);

  // Locality of the two gradients at the shared initialization.
  const auto mse_g = mse_gradient_wrt_phi(gt_enc.psi, psi0, phi0, g.hp);
  const auto eie_g = descent_direction(gt_enc.psi, psi0, EieParams(o.alpha));
  const double pixels = static_cast<double>(g.shape.size());
  std::size_t mse_zero = 0;
  std::size_t eie_zero = 0;
  std::size_t outside = 0;
  bool mse_zero_outside = true;
  for (std::size_t i = 0; i < g.shape.size(); ++i) {
    const bool far = std::abs(phi0.values()[i]) >= sigma;
    mse_zero += mse_g.values()[i] == 0.0 ? 1 : 0;
    eie_zero += eie_g.values()[i] == 0.0 ? 1 : 0;
    outside += far ? 1 : 0;
    if (far && mse_g.values()[i] != 0.0) mse_zero_outside = false;
  }
  const double eie_max = eie_g.max_abs();
  double column_min = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < gt.size(); ++r) {
    if (!gt.valid[r]) continue;
    const int x = std::clamp(static_cast<int>(std::lround(gt.xs[r])), 0, g.shape.width() - 1);
    column_min = std::min(column_min, std::abs(eie_g(x, gt.rows[r])));
  }
  ordered_json locality;
  locality["mse_zero_fraction"] = mse_zero / pixels;
  locality["eie_zero_fraction"] = eie_zero / pixels;
  locality["outside_band_fraction"] = outside / pixels;
  locality["mse_zero_outside_band"] = mse_zero_outside;
  locality["eie_gt_column_min_ratio"] = eie_max > 0.0 ? column_min / eie_max : 0.0;

  const auto eie_trace = evolve_implicit(psi0, gt_enc.psi, gt_enc.range, cfg);
  const auto mse_trace = evolve_implicit_mse(phi0, gt_enc.psi, gt_enc.range, cfg);

  ordered_json report;
  report["eie_trace"] = trace_summary(eie_trace);
  report["mse_trace"] = trace_summary(mse_trace);
  report["locality"] = locality;
  const auto text = write_report_json(report);
  if (!o.out.empty()) {
    const fs::path dir(o.out);
    write_file(dir / "eie_trace.csv", write_trace_csv(eie_trace));
    write_file(dir / "mse_trace.csv", write_trace_csv(mse_trace));
    write_file(dir / "losscmp.json", text);
  }
  out << text;
  return kOk;
}

void add_grid_options(CLI::App* app, Options& o) {
  app->add_option("--grid", o.grid, "ELM grid size WxH")->capture_default_str();
  app->add_option("--sigma", o.sigma, "Heaviside band half-width (default 5 for 18 rows, else 3)");
  app->add_option("--image", o.image, "Label image size WxH; labels are scaled onto the grid");
  app->add_option("--capacity", o.capacity, "Lane slots N")->capture_default_str();
}

void add_flow_options(CLI::App* app, Options& o) {
  app->add_option("--alpha", o.alpha, "Prediction weight in D = G - alpha Psi")->capture_default_str();
  app->add_option("--step", o.step, "Step size (default 0.9x stable step implicit, 1.0 explicit)");
  app->add_option("--max-steps", o.max_steps)->capture_default_str();
  app->add_option("--reinit-every", o.reinit_every, "Redistance every k steps, 0 = never")
      ->capture_default_str();
  app->add_option("--record-every", o.record_every)->capture_default_str();
  app->add_option("--out", o.out, "Output directory");
  app->add_option("--gt-x", o.gt_x, "Synthetic vertical ground truth at this x");
  app->add_option("--offset", o.offset, "Initial prediction = ground truth shifted by this many px");
  app->add_option("--lane", o.lane, "Lane slot to use from label files")->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Elastic lane map encoding, EIE gradient flows and lane metrics"};
  app.name("elasticlane");
  app.require_subcommand(1);

  auto* encode = app.add_subcommand("encode", "Encode a label file into per-lane PGM fields");
  encode->add_option("labels", o.labels, "CULane-style annotation file")->required();
  add_grid_options(encode, o);
  encode->add_option("--out", o.out, "Output directory");

  auto* evolve = app.add_subcommand("evolve", "Gradient flow of a prediction towards its ground truth");
  add_grid_options(evolve, o);
  add_flow_options(evolve, o);
  evolve->add_option("--gt", o.gt, "Ground-truth label file");
  evolve->add_option("--init", o.init, "Initial prediction label file");
  evolve->add_option("--mode", o.mode, "implicit or explicit")->capture_default_str();
  evolve->add_option("--sampling", o.sampling, "Explicit velocity readout: bilinear or delta")
      ->capture_default_str();
  evolve->add_flag("--snapshots", o.snapshots, "Write PGM snapshots of recorded steps");

  auto* eval = app.add_subcommand("eval", "Score prediction files against ground truth");
  eval->add_option("pred_dir", o.pred_dir)->required();
  eval->add_option("gt_dir", o.gt_dir)->required();
  eval->add_option("--metric", o.metric, "culane or tusimple")->capture_default_str();
  eval->add_option("--image", o.image, "Evaluation image size WxH (culane)");
  eval->add_option("--iou-thresh", o.iou_thresh)->capture_default_str();
  eval->add_option("--width-px", o.width_px)->capture_default_str();
  eval->add_option("--x-thresh", o.x_thresh)->capture_default_str();
  eval->add_option("--match-frac", o.match_frac)->capture_default_str();
  eval->add_option("--per-image", o.per_image, "Write per-image scores as CSV");

  auto* gradcheck = app.add_subcommand("gradcheck", "Check the FFT and gradient against oracles");
  gradcheck->add_option("--seed", o.seed)->capture_default_str();
  gradcheck->add_option("--dft-size", o.dft_size)->capture_default_str();
  gradcheck->add_option("--fd-size", o.fd_size)->capture_default_str();
  gradcheck->add_option("--dft-trials", o.dft_trials)->capture_default_str();
  gradcheck->add_option("--fd-trials", o.fd_trials)->capture_default_str();
  gradcheck->add_flag("--corrupt-kernel", o.corrupt_kernel, "Test hook: use a wrong kernel");

  auto* losscmp = app.add_subcommand("losscmp", "Paired EIE and MSE flows from one initialization");
  add_grid_options(losscmp, o);
  add_flow_options(losscmp, o);
  losscmp->add_option("--gt", o.gt, "Ground-truth label file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }

  try {
    if (encode->parsed()) return cmd_encode(o, out);
    if (evolve->parsed()) return cmd_evolve(o, out);
    if (eval->parsed()) return cmd_eval(o, out);
    if (gradcheck->parsed()) return cmd_gradcheck(o, out);
    if (losscmp->parsed()) return cmd_losscmp(o, out);
  } catch (const CapacityExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kCapacityExceeded;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kDiverged;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }
  return kParseError;
}

}  // namespace elasticlane::cli
