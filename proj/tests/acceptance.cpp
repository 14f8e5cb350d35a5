// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "elasticlane/elm.hpp"
#include "elasticlane/energy.hpp"
#include "elasticlane/evolve.hpp"
#include "elasticlane/field.hpp"
#include "elasticlane/metrics.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace elasticlane;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome spectral_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  const GridShape s(8, 8);
  double err = 0.0;
  double rt = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto f = oracle::random_field(s, seed);
    const auto spec = dft_forward(f);
    const auto ref = oracle::naive_dft(f);
    for (std::size_t i = 0; i < ref.size(); ++i) err = std::max(err, std::abs(spec.coefficients()[i] - ref[i]));
    const auto back = dft_inverse(spec);
    for (std::size_t i = 0; i < s.size(); ++i) rt = std::max(rt, std::abs(back.values()[i] - f.values()[i]));
  }
  const double secs = seconds_since(t0);
  return {err < 1e-9 && rt < 1e-12 && secs < 5.0,
          fmt("max_abs_vs_naive=%.3g roundtrip=%.3g time=%.3fs", err, rt, secs)};
}

Outcome energy_formula() {
  const GridShape s(8, 8);
  Field2D d(s);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) d(x, y) = std::cos(2.0 * std::numbers::pi * x / 8.0);
  const double e = eie_energy(d);
  double parseval = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = oracle::random_field(GridShape(16, 12), seed);
    double lhs = 0.0;
    for (double v : f.values()) lhs += v * v;
    lhs /= static_cast<double>(f.shape().size());
    double rhs = 0.0;
    for (auto c : dft_forward(f).coefficients()) rhs += std::norm(c);
    parseval = std::max(parseval, std::abs(lhs - rhs) / lhs);
  }
  return {std::abs(e - 0.5) < 1e-12 && parseval < 1e-10,
          fmt("energy(cos)=%.17g parseval_rel=%.3g", e, parseval)};
}

Outcome gradient_consistency() {
  const auto t0 = std::chrono::steady_clock::now();
  const GridShape s(16, 16);
  double min_cos = 1.0;
  double lo = 0.0;
  double hi = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto d = oracle::random_field(s, 1000 + k);
    const auto fd = oracle::fd_energy_gradient(d, 1e-5);
    const auto g = eie_gradient(d);
    min_cos = std::min(min_cos, oracle::cosine(fd, g));
    const double c = oracle::fitted_scale(fd, g);
    lo = k == 0 ? c : std::min(lo, c);
    hi = k == 0 ? c : std::max(hi, c);
  }
  const double spread = (hi - lo) / (0.5 * (hi + lo));
  const double secs = seconds_since(t0);
  const double expected = exact_gradient_scale(s);
  return {min_cos > 1.0 - 1e-6 && spread < 1e-6 && secs < 30.0,
          fmt("min_cosine=%.12f scale=[%.12g, %.12g] spread=%.3g expected=%.12g time=%.3fs", min_cos, lo, hi,
              spread, expected, secs)};
}

Outcome annihilation() {
  const GridShape s(100, 64);
  const auto g = encode_lane(LanePolyline::vertical(40, 64), s, HeavisideParams(5)).psi;
  const auto d = difference_field(g, g, EieParams(1.0));
  const double e = eie_energy(d);
  const double gmax = eie_gradient(d).max_abs();
  return {e < 1e-12 && gmax == 0.0, fmt("energy=%.3g max|gradient|=%.3g", e, gmax)};
}

Outcome attraction() {
  const GridShape s(100, 64);
  const HeavisideParams hp(5.0);
  EvolutionConfig cfg;
  cfg.sigma = 5.0;
  cfg.alpha = 0.5;
  const auto gt_lane = LanePolyline::vertical(40, 64);
  const auto init = LanePolyline::vertical(20, 64);
  auto monotone = [](const EvolutionTrace& t) {
    for (std::size_t i = 1; i < t.size(); ++i)
      if (t.energies[i] > t.energies[i - 1] + kEnergySlack) return false;
    return true;
  };

  auto t0 = std::chrono::steady_clock::now();
  cfg.mode = EvolutionMode::Implicit;
  cfg.step_size = 0.9 * stable_step_size(s, cfg.alpha);
  const auto gt = encode_lane(gt_lane, s, hp);
  const auto ti = evolve_implicit(encode_lane(init, s, hp).psi, gt.psi, gt.range, cfg);
  const double secs_i = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  cfg.mode = EvolutionMode::Explicit;
  cfg.step_size = 1.0;
  const auto tx = evolve_explicit(init, gt_lane, s, cfg);
  const double secs_x = seconds_since(t0);

  const bool ok_i = ti.converged && ti.lane_errors.back() < 1.0 && monotone(ti) && secs_i < 10.0;
  const bool ok_x = tx.converged && tx.lane_errors.back() < 1.0 && monotone(tx) && secs_x < 10.0;
  return {ok_i && ok_x,
          fmt("implicit: h=%.4g steps=%d err=%.4gpx monotone=%d %.3fs | explicit: h=1 steps=%d err=%.4gpx "
              "monotone=%d %.3fs",
              ti.steps.empty() ? 0.0 : 0.9 * stable_step_size(s, 0.5), ti.steps_taken, ti.lane_errors.back(),
              monotone(ti), secs_i, tx.steps_taken, tx.lane_errors.back(), monotone(tx), secs_x)};
}

Outcome long_range() {
  const GridShape s(128, 128);
  const double sigma = 3.0;
  const HeavisideParams hp(sigma);
  const double xg = 79.0;
  const auto pred = LanePolyline::vertical(xg - 10.0 * sigma, 128);
  const auto gt = encode_lane(LanePolyline::vertical(xg, 128), s, hp).psi;
  const auto phi = build_level_set(pred, s);
  const auto psi = psi_from_level_set(phi, hp);
  const auto mse = mse_gradient_wrt_phi(gt, psi, phi, hp);
  bool mse_local = true;
  std::size_t far = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::abs(phi.values()[i]) >= sigma) {
      ++far;
      if (mse.values()[i] != 0.0) mse_local = false;
    }
  }
  const auto g = eie_gradient(difference_field(gt, psi, EieParams(0.5)));
  double col_min = INFINITY;
  for (int y = 0; y < 128; ++y) col_min = std::min(col_min, std::abs(g(static_cast<int>(xg), y)));
  const double ratio = col_min / g.max_abs();
  return {mse_local && far > 0 && ratio > 1e-6,
          fmt("mse_zero_on_%zu_far_pixels=%d eie_min_ratio_at_gt_column=%.3g", far, mse_local, ratio)};
}

Outcome round_trip() {
  std::mt19937_64 rng(2024);
  const GridShape s(100, 36);
  double worst = 0.0;
  int invalid = 0;
  for (int k = 0; k < 100; ++k) {
    const auto lane = testing::random_smooth_lane(rng, 100, 36);
    const auto enc = encode_lane(lane, s, HeavisideParams(3.0));
    const auto dec = decode_lane(enc.psi, enc.range);
    for (int r = 0; r < 36; ++r) {
      if (!dec.valid[r]) {
        ++invalid;
        continue;
      }
      worst = std::max(worst, std::abs(dec.xs[r] - lane.xs[r]));
    }
  }
  return {worst <= 0.5 && invalid == 0, fmt("max_row_error=%.3g invalid_rows=%d", worst, invalid)};
}

Outcome delta_identity() {
  const GridShape s(64, 16);
  double worst_edge = 0.0;
  double worst_inner = 0.0;
  for (double sigma : {3.0, 5.0}) {
    for (double x0 : {30.0, 30.4}) {
      const auto lane = LanePolyline::vertical(x0, 16);
      const auto psi = encode_lane(lane, s, HeavisideParams(sigma)).psi;
      const auto d = delta_field(lane, sigma, s).field;
      for (int y = 0; y < 16; ++y) {
        for (int x = 1; x < 63; ++x) {
          const double dev = std::abs(0.5 * (psi(x + 1, y) - psi(x - 1, y)) - d(x, y));
          if (std::abs(x - x0) < sigma - 1.0) worst_inner = std::max(worst_inner, dev);
          worst_edge = std::max(worst_edge, dev * 2.0 * sigma);
        }
      }
    }
  }
  return {worst_edge <= 1.0 + 1e-12 && worst_inner < 1e-12,
          fmt("inner_band_dev=%.3g edge_dev_in_units_of_1/(2sigma)=%.3g", worst_inner, worst_edge)};
}

Outcome loss_formulas() {
  const std::vector<double> p(8, 0.5);
  const std::vector<double> y{1, 0, 1, 1, 0, 0, 1, 0};
  const double bce = range_bce(p, y);
  const LossWeights w;
  const double total = total_loss(1, 1, 1, 1, w);
  const GridShape s(16, 16);
  const auto g2 = oracle::random_field(s, 1);
  const auto g3 = oracle::random_field(s, 2);
  const auto p2 = oracle::random_field(s, 3);
  const auto p3 = oracle::random_field(s, 4);
  const EieParams ep(0.5);
  const double aux = aux_loss(p2, p3, g2, g3, w, ep);
  const double expect = 0.3 * eie_energy(difference_field(g2, p2, ep)) + 0.3 * eie_energy(difference_field(g3, p3, ep));
  const bool ok = std::abs(bce - std::log(2.0)) < 1e-9 && total == 2.3 && w.aux_lambda1 == 0.3 &&
                  w.aux_lambda2 == 0.3 && std::abs(aux - expect) <= 1e-12 * expect;
  return {ok, fmt("range_bce(0.5)=%.12f total_loss(1,1,1,1)=%.17g aux=%.12g expected=%.12g", bce, total, aux, expect)};
}

Outcome metrics_suite() {
  const ImageSize image{200, 100};
  auto set = [&](std::initializer_list<double> xs) {
    LaneSet s;
    s.image = image;
    for (double x : xs) s.lanes.push_back(LanePolyline::vertical(x, 100));
    return s;
  };
  const auto gts = set({30, 90, 150});
  const double self_f1 = match_and_score(gts, gts).f1;
  const double fp_f1 = match_and_score(set({40, 170}), set({40})).f1;
  const double iou = lane_iou(rasterize_lane(LanePolyline::vertical(50, 100), 30, image),
                              rasterize_lane(LanePolyline::vertical(65, 100), 30, image));
  std::vector<int> rows(36);
  for (int r = 0; r < 36; ++r) rows[r] = 2 * r;
  LaneSet tgt{image, {LanePolyline(rows, std::vector<double>(36, 50.0))}, {}};
  const double acc = tusimple_score(tgt, tgt).acc;
  const bool ok = self_f1 == 1.0 && fp_f1 == 2.0 / 3.0 && std::abs(iou - 1.0 / 3.0) < 1e-12 && acc == 1.0;
  return {ok, fmt("self_f1=%.17g one_tp_one_fp_f1=%.17g half_overlap_iou=%.17g tusimple_acc=%.17g", self_f1, fp_f1,
                  iou, acc)};
}

struct CliRun {
  int code;
  std::string out;
};

CliRun cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "elasticlane");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

Outcome determinism() {
  const auto g1 = cli_run({"gradcheck", "--seed", "42"});
  const auto g2 = cli_run({"gradcheck", "--seed", "42"});
  const fs::path base = fs::temp_directory_path() / "elasticlane_acceptance";
  fs::remove_all(base);
  bool evolve_same = true;
  for (const char* mode : {"implicit", "explicit"}) {
    std::vector<std::string> args{"evolve", "--grid", "100x64", "--sigma", "5", "--gt-x", "40", "--offset", "-20",
                                  "--mode", mode, "--snapshots", "--record-every", "20"};
    auto a1 = args;
    a1.insert(a1.end(), {"--out", (base / mode / "a").string()});
    auto a2 = args;
    a2.insert(a2.end(), {"--out", (base / mode / "b").string()});
    const auto e1 = cli_run(a1);
    const auto e2 = cli_run(a2);
    evolve_same = evolve_same && e1.code == 0 && e1.out == e2.out &&
                  slurp(base / mode / "a" / "trace.csv") == slurp(base / mode / "b" / "trace.csv") &&
                  slurp(base / mode / "a" / "snapshots" / "step_000020.pgm") ==
                      slurp(base / mode / "b" / "snapshots" / "step_000020.pgm");
  }
  fs::remove_all(base);
  const bool grad_same = g1.code == 0 && g1.out == g2.out;
  return {grad_same && evolve_same, fmt("gradcheck_identical=%d evolve_identical=%d", grad_same, evolve_same)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"spectral correctness", spectral_correctness},
      {"energy formula", energy_formula},
      {"gradient consistency", gradient_consistency},
      {"annihilation", annihilation},
      {"attraction convergence", attraction},
      {"long-range vs local", long_range},
      {"encode/decode round trip", round_trip},
      {"delta/Heaviside identity", delta_identity},
      {"loss formulas", loss_formulas},
      {"metrics micro-suite", metrics_suite},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
