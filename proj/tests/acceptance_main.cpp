// Acceptance suite: one pass/fail line per criterion, exit code equals the
// number of failed criteria. Tolerances are pinned in the checks below.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "voxmat/voxmat.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace voxmat;

namespace {

struct Criterion {
  const char* name;
  std::function<bool(std::string&)> run;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

VolumeGrid random_normalized(std::array<int, 3> dims, unsigned seed) {
  VolumeGrid v = make_volume(dims, {1, 1, 1}, Unit::Normalized);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<> u(0.0, 1.0);
  for (auto& x : v.values) x = static_cast<float>(u(rng));
  return v;
}

oracle::Dense to_dense(const SparseSymMatrix& A) {
  oracle::Dense d(A.size());
  for (std::int64_t p = 0; p < A.size(); ++p) {
    const auto cols = A.row_cols(p);
    const auto vals = A.row_vals(p);
    for (std::size_t c = 0; c < cols.size(); ++c) d.at(p, cols[c]) = vals[c];
  }
  return d;
}

struct PhantomCase {
  PhantomSet set;
  Trimap trimap;
};

PhantomCase phantom_case(int size, std::uint64_t seed, double noise_sigma,
                         int dilate_radius) {
  PhantomSpec spec;
  spec.size = size;
  spec.seed = seed;
  spec.noise_hu_sigma = noise_sigma;
  PhantomCase pc{make_phantom(spec, 4), {}};
  const auto fused = fuse_masks(pc.set.masks);
  pc.trimap = build_trimap(fused.overlap, fused.union_mask, dilate_radius);
  return pc;
}

double mean_abs_error_over_unknown(const AlphaMatte& got, const AlphaMatte& gt,
                                   const Trimap& trimap) {
  double err = 0.0;
  std::int64_t count = 0;
  for (std::size_t i = 0; i < got.values.size(); ++i) {
    if (trimap.values[i] == static_cast<std::uint8_t>(TrimapLabel::Unknown)) {
      err += std::abs(double(got.values[i]) - gt.values[i]);
      ++count;
    }
  }
  return count ? err / count : 1e9;
}

// ---- criterion 1: Laplacian algebra --------------------------------------

bool criterion_laplacian_algebra(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  const VolumeGrid v12 = random_normalized({12, 12, 12}, 2024);
  const SparseSymMatrix L = build_cf_laplacian(v12, {});
  const double row_sum = L.max_abs_row_sum();
  const double sym = L.symmetry_defect();

  // dense PSD check on a 5^3 sub-case of the same volume
  VolumeGrid v5 = make_volume({5, 5, 5}, {1, 1, 1}, Unit::Normalized);
  for (int z = 0; z < 5; ++z)
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 5; ++x) v5.at(x, y, z) = v12.at(x, y, z);
  const SparseSymMatrix L5 = build_cf_laplacian(v5, {});
  const double min_eig = oracle::min_eigenvalue(to_dense(L5));
  const double elapsed = seconds_since(t0);

  std::ostringstream os;
  os << "row_sum=" << row_sum << " sym=" << sym << " min_eig=" << min_eig
     << " time=" << elapsed << "s";
  detail = os.str();
  return row_sum <= 1e-9 && sym <= 1e-12 && min_eig >= -1e-8 && elapsed < 5.0;
}

// ---- criterion 2: dense-oracle equivalence -------------------------------

bool criterion_dense_equivalence(std::string& detail) {
  const VolumeGrid v3 = random_normalized({3, 3, 3}, 5);
  const SparseSymMatrix cf = build_cf_laplacian(v3, {});
  const oracle::Dense cf_ref =
      oracle::dense_cf_laplacian(v3.dims, v3.values, 3, 1e-7);
  double cf_err = 0.0;
  for (std::int64_t p = 0; p < 27; ++p)
    for (std::int64_t q = 0; q < 27; ++q)
      cf_err = std::max(
          cf_err,
          std::abs(cf.at(p, static_cast<std::int32_t>(q)) - cf_ref.at(p, q)));

  const VolumeGrid v4 = random_normalized({4, 4, 4}, 6);
  const FeatureArray f = build_features(v4, 1.0);
  const auto neighbors = knn_graph(f, 10);
  const SparseSymMatrix knn = build_knn_laplacian(f, neighbors, 10);
  const oracle::Dense knn_ref =
      oracle::dense_knn_laplacian(f.data, f.n, 4, neighbors, 10);
  double knn_err = 0.0;
  for (std::int64_t p = 0; p < f.n; ++p)
    for (std::int64_t q = 0; q < f.n; ++q)
      knn_err = std::max(
          knn_err,
          std::abs(knn.at(p, static_cast<std::int32_t>(q)) - knn_ref.at(p, q)));

  std::ostringstream os;
  os << "cf_max_err=" << cf_err << " knn_max_err=" << knn_err;
  detail = os.str();
  return cf_err <= 1e-12 && knn_err <= 1e-12;
}

// ---- criterion 3: solver correctness -------------------------------------

bool criterion_solver(std::string& detail) {
  SolveOptions tight;
  tight.tol_rel_residual = 1e-10;
  tight.max_iterations = 10000;

  // seeded dense SPD systems
  double spd_err = 0.0;
  for (unsigned seed : {11u, 12u, 13u}) {
    const std::int64_t n = 50;
    std::mt19937 rng(seed);
    oracle::Dense r(n);
    for (auto& x : r.a) x = std::uniform_real_distribution<>(-1, 1)(rng);
    oracle::Dense m(n);
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::int64_t k = 0; k < n; ++k) s += r.at(k, i) * r.at(k, j);
        m.at(i, j) = s + (i == j ? 1.0 : 0.0);
      }
    std::vector<std::int64_t> row_ptr(n + 1);
    std::vector<std::int32_t> cols(n * n);
    std::vector<double> vals(n * n);
    for (std::int64_t i = 0; i < n; ++i) {
      row_ptr[i] = i * n;
      for (std::int64_t j = 0; j < n; ++j) {
        cols[i * n + j] = static_cast<std::int32_t>(j);
        vals[i * n + j] = m.at(i, j);
      }
    }
    row_ptr[n] = n * n;
    const SparseSymMatrix A(n, std::move(row_ptr), std::move(cols),
                            std::move(vals));
    std::vector<double> b(n);
    for (auto& x : b) x = std::uniform_real_distribution<>(-1, 1)(rng);
    const auto [x, report] = pcg_solve(A, b, tight);
    const auto ref = oracle::dense_solve(m, b);
    for (std::int64_t i = 0; i < n; ++i)
      spd_err = std::max(spd_err, std::abs(x[i] - ref[i]));
  }

  // 8^3 closed-form matting system
  const PhantomCase pc = phantom_case(16, 31, 0.0, 2);
  VolumeGrid small = make_volume({8, 8, 8}, {1, 1, 1}, Unit::Normalized);
  const VolumeGrid normalized = clamp_window(pc.set.image, -1350.0, 150.0);
  Trimap tri8 = make_trimap({8, 8, 8}, {1, 1, 1});
  for (int z = 0; z < 8; ++z)
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) {
        small.at(x, y, z) = normalized.at(x + 4, y + 4, z + 4);
        tri8.at(x, y, z) = pc.trimap.at(x + 4, y + 4, z + 4);
      }
  const SparseSymMatrix L8 = build_cf_laplacian(small, {});
  const SoftConstraint c8 = binary_constraints(tri8, 100.0);
  const auto [A8, b8] = assemble_system(L8, c8);
  const auto [x8, rep8] = pcg_solve(A8, b8, tight);
  const auto ref8 = oracle::dense_solve(to_dense(A8), b8);
  double cf_err = 0.0;
  for (std::size_t i = 0; i < x8.size(); ++i)
    cf_err = std::max(cf_err, std::abs(x8[i] - ref8[i]));

  // 3-voxel chain with endpoint constraints
  std::vector<std::int64_t> row_ptr{0, 2, 5, 7};
  std::vector<std::int32_t> cols{0, 1, 0, 1, 2, 1, 2};
  std::vector<double> vals{1, -1, -1, 2, -1, -1, 1};
  const SparseSymMatrix chain(3, std::move(row_ptr), std::move(cols),
                              std::move(vals));
  SoftConstraint cc;
  cc.lambda = 100.0;
  cc.s_values = {1.0, 0.0, 0.0};
  cc.constrained = {1, 0, 1};
  const auto [Ac, bc] = assemble_system(chain, cc);
  const auto [xc, repc] = pcg_solve(Ac, bc, tight);
  const double chain_err = std::abs(xc[1] - 0.5);

  std::ostringstream os;
  os << "spd_max_err=" << spd_err << " cf8_max_err=" << cf_err
     << " chain_mid_err=" << chain_err;
  detail = os.str();
  return spd_err <= 1e-5 && cf_err <= 1e-5 && chain_err <= 1e-6;
}

// ---- criterion 4: phantom recovery ---------------------------------------

bool criterion_phantom_recovery(std::string& detail) {
  const PhantomCase clean = phantom_case(32, 7, 0.0, 2);

  MattingConfig cf_cfg;
  auto t0 = std::chrono::steady_clock::now();
  const auto [cf_matte, cf_rep] = solve_alpha(clean.set.image, clean.trimap, cf_cfg);
  const double cf_time = seconds_since(t0);
  const double cf_err =
      mean_abs_error_over_unknown(cf_matte, clean.set.gt_alpha, clean.trimap);

  MattingConfig knn_cfg;
  knn_cfg.method = MattingMethod::KNN;
  t0 = std::chrono::steady_clock::now();
  const auto [knn_matte, knn_rep] =
      solve_alpha(clean.set.image, clean.trimap, knn_cfg);
  const double knn_time = seconds_since(t0);
  const double knn_err =
      mean_abs_error_over_unknown(knn_matte, clean.set.gt_alpha, clean.trimap);

  const PhantomCase noisy = phantom_case(32, 7, 20.0, 2);
  t0 = std::chrono::steady_clock::now();
  const auto [noisy_matte, noisy_rep] =
      solve_alpha(noisy.set.image, noisy.trimap, cf_cfg);
  const double noisy_time = seconds_since(t0);
  const double noisy_err =
      mean_abs_error_over_unknown(noisy_matte, noisy.set.gt_alpha, noisy.trimap);

  std::ostringstream os;
  os << "cf_err=" << cf_err << " (" << cf_time << "s) knn_err=" << knn_err
     << " (" << knn_time << "s) cf_noisy_err=" << noisy_err << " ("
     << noisy_time << "s)";
  detail = os.str();
  return cf_rep.converged && knn_rep.converged && noisy_rep.converged &&
         cf_err <= 0.05 && knn_err <= 0.08 && noisy_err <= 0.08 &&
         cf_time < 60.0 && knn_time < 60.0 && noisy_time < 60.0;
}

// ---- criterion 5: calibration reduction ----------------------------------

bool criterion_calibration(std::string& detail) {
  // (a) window top at/below every FG intensity: CF+ must reduce to CF
  const PhantomCase pc = phantom_case(24, 23, 0.0, 2);
  float min_fg_hu = 1e9f;
  for (std::size_t i = 0; i < pc.trimap.values.size(); ++i) {
    if (pc.trimap.values[i] ==
        static_cast<std::uint8_t>(TrimapLabel::Foreground)) {
      min_fg_hu = std::min(min_fg_hu, pc.set.image.values[i]);
    }
  }
  MattingConfig plain;
  plain.window_min_hu = min_fg_hu - 1500.0;
  plain.window_max_hu = min_fg_hu;
  MattingConfig plus = plain;
  plus.calibrated = true;
  const auto [cf_matte, r1] = solve_alpha(pc.set.image, pc.trimap, plain);
  const auto [cfp_matte, r2] = solve_alpha(pc.set.image, pc.trimap, plus);
  double reduce_err = 0.0;
  for (std::size_t i = 0; i < cf_matte.values.size(); ++i) {
    reduce_err = std::max(
        reduce_err, std::abs(double(cf_matte.values[i]) - cfp_matte.values[i]));
  }

  // (b) sub-window-top FG intensities: CF+ targets track the HU ramp
  MattingConfig lung;  // default window -1350:150 sits above the FG range
  lung.calibrated = true;
  const auto [ramp_matte, r3] = solve_alpha(pc.set.image, pc.trimap, lung);
  const auto calib = HuCalibration::from_window(-1350.0, 150.0);
  double ramp_err = 0.0;
  std::int64_t fg_count = 0;
  bool fractional_seen = false;
  for (std::size_t i = 0; i < ramp_matte.values.size(); ++i) {
    if (pc.trimap.values[i] !=
        static_cast<std::uint8_t>(TrimapLabel::Foreground))
      continue;
    const double target = calib.foreground_alpha(pc.set.image.values[i]);
    ramp_err += std::abs(double(ramp_matte.values[i]) - target);
    fractional_seen = fractional_seen || (target > 0.0 && target < 1.0);
    ++fg_count;
  }
  ramp_err /= static_cast<double>(fg_count);

  std::ostringstream os;
  os << "reduction_max_diff=" << reduce_err << " ramp_mean_dev=" << ramp_err
     << " fg_count=" << fg_count;
  detail = os.str();
  return r1.converged && r2.converged && r3.converged &&
         reduce_err <= 2.0 * plain.solve.tol_rel_residual &&
         fractional_seen && ramp_err <= 0.02;
}

// ---- criterion 6: metric identities --------------------------------------

bool criterion_metric_identities(std::string& detail) {
  std::mt19937 rng(29);
  AlphaMatte a = make_alpha({8, 8, 8}, {1, 1, 1});
  for (auto& v : a.values)
    v = static_cast<float>(std::uniform_real_distribution<>(0, 1)(rng));
  const bool zeros = sad(a, a) == 0.0 && mse(a, a) == 0.0 &&
                     grad_error(a, a) == 0.0 && conn_error(a, a) == 0.0;

  AlphaMatte b = make_alpha({8, 8, 8}, {1, 1, 1});
  for (auto& v : b.values)
    v = static_cast<float>(std::uniform_real_distribution<>(0, 1)(rng));
  const LabelMask empty = make_mask({8, 8, 8}, {1, 1, 1}, 0);
  const LabelMask full = make_mask({8, 8, 8}, {1, 1, 1}, 1);
  const double l_empty = weighted_alpha_loss(a, b, empty);
  const double l_full = weighted_alpha_loss(a, b, full);
  const bool doubles_exactly = l_full == 2.0 * l_empty;

  AlphaMatte base = make_alpha({8, 8, 8}, {1, 1, 1});
  for (auto& v : base.values)
    v = static_cast<float>(std::uniform_real_distribution<>(0, 0.5)(rng));
  AlphaMatte offset = base;
  for (auto& v : offset.values) v += 0.25f;
  const double grad_const = grad_error(offset, base);

  MetricStat s{15262.0, 738.0};
  const std::string formatted =
      AggregateReport::format(s, MatteMetrics::kSadScale);
  const bool format_ok = formatted == "152.62(±7.38)";

  std::ostringstream os;
  os << "zeros=" << zeros << " doubling=" << doubles_exactly
     << " grad_const=" << grad_const << " formatted=" << formatted;
  detail = os.str();
  return zeros && doubles_exactly && grad_const <= 1e-12 && format_ok;
}

// ---- criterion 7: trimap properties --------------------------------------

bool criterion_trimap_properties(std::string& detail) {
  std::mt19937 rng(41);
  int cases_checked = 0;
  for (unsigned seed = 0; seed < 4; ++seed) {
    // random 9^3 overlap/union pair with overlap inside union
    LabelMask u = make_mask({9, 9, 9}, {1, 1, 1});
    LabelMask o = make_mask({9, 9, 9}, {1, 1, 1});
    for (std::size_t i = 0; i < u.values.size(); ++i) {
      u.values[i] = (rng() % 4) == 0 ? 1 : 0;
      o.values[i] = u.values[i] && (rng() % 2) == 0 ? 1 : 0;
    }
    std::vector<std::uint8_t> prev_unknown;
    for (int radius = 0; radius <= 3; ++radius) {
      const Trimap t = build_trimap(o, u, radius);
      const Trimap base = build_trimap(o, u, 0);
      const auto expected =
          oracle::brute_force_dilate_unknown({9, 9, 9}, base.values, radius);
      if (t.values != expected) {
        detail = "dilation disagrees with the brute-force oracle";
        return false;
      }
      std::vector<std::uint8_t> unknown(t.values.size());
      for (std::size_t i = 0; i < t.values.size(); ++i) {
        if (t.values[i] > 2) {
          detail = "labels do not partition";
          return false;
        }
        unknown[i] = t.values[i] == 1;
        // FG only where the base was FG, BG only where the base was BG
        if (t.values[i] == 2 && base.values[i] != 2) {
          detail = "FG grew under dilation";
          return false;
        }
        if (t.values[i] == 0 && base.values[i] != 0) {
          detail = "BG grew under dilation";
          return false;
        }
      }
      if (radius > 0) {
        for (std::size_t i = 0; i < unknown.size(); ++i) {
          if (prev_unknown[i] && !unknown[i]) {
            detail = "UNK not monotone in radius";
            return false;
          }
        }
      }
      prev_unknown = unknown;
      ++cases_checked;
    }
  }
  std::ostringstream os;
  os << cases_checked << " radius cases against the oracle";
  detail = os.str();
  return true;
}

// ---- criterion 8: pipeline end-to-end ------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = std::string(VOXMAT_CLI_PATH) + " " + args +
                          " >/dev/null 2>&1";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

json load_json_file(const fs::path& path) {
  std::ifstream in(path);
  json j;
  in >> j;
  return j;
}

bool criterion_pipeline(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path root =
      fs::temp_directory_path() /
      ("voxmat_acceptance_" + std::to_string(std::random_device{}()));
  fs::create_directories(root);
  const std::string ph = (root / "ph").string();
  const std::string pipe = (root / "pipe").string();
  bool ok = true;
  std::ostringstream os;

  if (run_cli("phantom --out-dir " + ph + " --size 32 --seed 7") != 0) {
    detail = "phantom command failed";
    return false;
  }
  const std::string masks =
      ph + "/mask_0 " + ph + "/mask_1 " + ph + "/mask_2 " + ph + "/mask_3";
  if (run_cli("pipeline --image " + ph + "/image --masks " + masks + " --gt " +
              ph + "/gt_alpha --out-dir " + pipe +
              " --crop-xy 0 --dilate-radius 2") != 0) {
    detail = "pipeline command failed";
    return false;
  }
  const json manifest = load_json_file(root / "pipe" / "manifest.json");
  if (manifest.at("candidates").size() != 4 || !manifest.at("errors").empty()) {
    detail = "expected 4 clean candidates";
    return false;
  }
  for (const auto& candidate : manifest["candidates"]) {
    const std::string alpha = candidate.at("alpha").get<std::string>();
    const std::string report = (root / "eval.json").string();
    if (run_cli("eval --pred " + alpha + " --gt " + pipe + "/gt --out " +
                report) != 0) {
      detail = "eval command failed";
      return false;
    }
    const json eval_out = load_json_file(report);
    if (eval_out["cases"][0]["raw"] != candidate["metrics"]["raw"] ||
        eval_out["cases"][0]["scaled"] != candidate["metrics"]["scaled"]) {
      os << candidate["name"] << ": manifest metrics differ from eval; ";
      ok = false;
    }
  }
  const double elapsed = seconds_since(t0);
  os << "4 candidates cross-checked, time=" << elapsed << "s";
  detail = os.str();
  std::error_code ec;
  fs::remove_all(root, ec);
  return ok && elapsed < 300.0;
}

// ---- criterion 9: I/O round-trip -----------------------------------------

bool criterion_io_roundtrip(std::string& detail) {
  const fs::path root =
      fs::temp_directory_path() /
      ("voxmat_io_acceptance_" + std::to_string(std::random_device{}()));
  fs::create_directories(root);
  std::mt19937 rng(2025);
  std::uniform_int_distribution<int> dim(1, 6);
  bool ok = true;
  int done = 0;
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    const std::array<int, 3> dims{dim(rng), dim(rng), dim(rng)};
    const std::array<double, 3> spacing{0.25 * (1 + rng() % 8), 0.5, 1.0};
    const std::string stem = (root / ("t" + std::to_string(trial))).string();
    switch (trial % 4) {
      case 0: {
        VolumeGrid v = make_volume(dims, spacing, Unit::HU);
        for (auto& x : v.values)
          x = static_cast<float>(
              std::uniform_real_distribution<>(-2000, 2000)(rng));
        write_volume(v, stem);
        ok = std::get<VolumeGrid>(read_volume(stem)).values == v.values;
        break;
      }
      case 1: {
        AlphaMatte a = make_alpha(dims, spacing);
        for (auto& x : a.values)
          x = static_cast<float>(std::uniform_real_distribution<>(0, 1)(rng));
        write_volume(a, stem);
        ok = std::get<AlphaMatte>(read_volume(stem)).values == a.values;
        break;
      }
      case 2: {
        LabelMask m = make_mask(dims, spacing);
        for (auto& x : m.values) x = rng() & 1;
        write_volume(m, stem);
        ok = std::get<LabelMask>(read_volume(stem)).values == m.values;
        break;
      }
      default: {
        Trimap t = make_trimap(dims, spacing);
        for (auto& x : t.values) x = static_cast<std::uint8_t>(rng() % 3);
        write_volume(t, stem);
        ok = std::get<Trimap>(read_volume(stem)).values == t.values;
        break;
      }
    }
    if (ok) ++done;
  }

  // corrupted payload length
  bool corrupt_ok = false;
  {
    const std::string stem = (root / "corrupt").string();
    write_volume(make_volume({2, 2, 2}, {1, 1, 1}, Unit::HU, 1.0f), stem);
    fs::resize_file(stem + ".raw", 31);
    try {
      (void)read_volume(stem);
    } catch (const CorruptFile&) {
      corrupt_ok = true;
    }
  }
  // out-of-range payload
  bool range_ok = false;
  {
    const std::string stem = (root / "range").string();
    write_volume(make_alpha({2, 2, 2}, {1, 1, 1}, 0.5f), stem);
    std::fstream raw(stem + ".raw",
                     std::ios::binary | std::ios::in | std::ios::out);
    const float bad = -0.25f;
    raw.write(reinterpret_cast<const char*>(&bad), 4);
    raw.close();
    try {
      (void)read_volume(stem);
    } catch (const OutOfRangeValue&) {
      range_ok = true;
    }
  }

  std::ostringstream os;
  os << done << "/1000 round-trips bitwise, corrupt_rejected=" << corrupt_ok
     << " range_rejected=" << range_ok;
  detail = os.str();
  std::error_code ec;
  fs::remove_all(root, ec);
  return ok && done == 1000 && corrupt_ok && range_ok;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"Laplacian algebra (row sums, symmetry, PSD, <5s)",
       criterion_laplacian_algebra},
      {"dense-oracle equivalence (CF 3^3, KNN 4^3, 1e-12)",
       criterion_dense_equivalence},
      {"solver correctness (SPD 50x50, CF 8^3, 3-chain)", criterion_solver},
      {"phantom recovery (CF<=0.05, KNN<=0.08, noisy CF<=0.08)",
       criterion_phantom_recovery},
      {"calibration reduction (CF+ == CF, HU ramp tracking)",
       criterion_calibration},
      {"metric identities (zeros, doubling, constants, format)",
       criterion_metric_identities},
      {"trimap properties (partition, monotone dilation, oracle)",
       criterion_trimap_properties},
      {"pipeline end-to-end (4 candidates, metrics match eval, <5min)",
       criterion_pipeline},
      {"I/O round-trip (1000 volumes bitwise, corrupt/range rejected)",
       criterion_io_roundtrip},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string note;
    bool ok = false;
    try {
      ok = criteria[i].run(note);
    } catch (const std::exception& e) {
      note = std::string("exception: ") + e.what();
    }
    std::printf("criterion %zu: %-60s %s\n", i + 1, criteria[i].name,
                ok ? "PASS" : "FAIL");
    std::printf("             %s\n", note.c_str());
    if (!ok) ++failures;
  }
  if (failures == 0) {
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  } else {
    std::printf("%d acceptance criteria FAILED\n", failures);
  }
  return failures;
}
