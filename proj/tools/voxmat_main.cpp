// voxmat: command-line surface for the 3D matting engine.
//
// Subcommands: phantom, trimap, mat, eval, pipeline.
// Exit codes: 0 success, 2 usage/input error, 3 solver non-convergence,
// 1 unexpected failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "voxmat/voxmat.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNotConverged = 3;

std::pair<double, double> parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw voxmat::InvalidArgument("window must be w_min:w_max, got '" + text +
                                  "'");
  }
  try {
    const double lo = std::stod(text.substr(0, colon));
    const double hi = std::stod(text.substr(colon + 1));
    if (lo >= hi) {
      throw voxmat::InvalidArgument("window w_min must be < w_max");
    }
    return {lo, hi};
  } catch (const std::invalid_argument&) {
    throw voxmat::InvalidArgument("cannot parse window '" + text + "'");
  }
}

std::pair<double, double> parse_range(const std::string& text,
                                      const char* what) {
  const auto colon = text.find(':', 1);  // skip a possible leading minus
  if (colon == std::string::npos) {
    throw voxmat::InvalidArgument(std::string(what) + " must be lo:hi");
  }
  return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
}

ordered_json report_to_json(const voxmat::SolveReport& r) {
  ordered_json j;
  j["iterations"] = r.iterations;
  j["final_rel_residual"] = r.final_rel_residual;
  j["converged"] = r.converged;
  j["wall_time_s"] = r.wall_time_s;
  return j;
}

ordered_json metrics_to_json(const voxmat::MatteMetrics& m) {
  ordered_json j;
  j["raw"] = {{"sad", m.sad}, {"mse", m.mse}, {"grad", m.grad}, {"conn", m.conn}};
  j["scaled"] = {{"sad", m.sad_scaled()},
                 {"mse", m.mse_scaled()},
                 {"grad", m.grad_scaled()},
                 {"conn", m.conn_scaled()}};
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    throw voxmat::IoError("cannot open for writing: " + path.string());
  }
  out << text;
}

// Mid-slice axial/coronal/sagittal montage as a binary PGM (P5), slices laid
// out left to right with a 2-pixel divider.
void write_montage_pgm(const voxmat::AlphaMatte& m, const fs::path& path) {
  const int nx = m.dims[0], ny = m.dims[1], nz = m.dims[2];
  const int gap = 2;
  const int width = nx + gap + nx + gap + ny;
  const int height = std::max(ny, nz);
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height, 0);
  const auto shade = [](float v) {
    return static_cast<std::uint8_t>(
        std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
  };
  const int zc = nz / 2, yc = ny / 2, xc = nx / 2;
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x)
      pixels[static_cast<std::size_t>(y) * width + x] = shade(m.at(x, y, zc));
  for (int z = 0; z < nz; ++z)
    for (int x = 0; x < nx; ++x)
      pixels[static_cast<std::size_t>(z) * width + nx + gap + x] =
          shade(m.at(x, yc, z));
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      pixels[static_cast<std::size_t>(z) * width + nx + gap + nx + gap + y] =
          shade(m.at(xc, y, z));

  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw voxmat::IoError("cannot open for writing: " + path.string());
  }
  out << "P5\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
}

struct PhantomArgs {
  std::string out_dir;
  int size = 32;
  std::uint64_t seed = 1;
  int n_masks = 4;
  std::string fg_range = "0:100";
  std::string bg_range = "-950:-850";
  double blob_radius_frac = 0.35;
  double edge_softness_frac = 0.3;
  double noise_sigma = 0.0;
  double spacing = 0.5;
};

int cmd_phantom(const PhantomArgs& args) {
  voxmat::PhantomSpec spec;
  spec.size = args.size;
  spec.seed = args.seed;
  std::tie(spec.fg_hu_lo, spec.fg_hu_hi) = parse_range(args.fg_range, "fg range");
  std::tie(spec.bg_hu_lo, spec.bg_hu_hi) = parse_range(args.bg_range, "bg range");
  spec.blob_radius_frac = args.blob_radius_frac;
  spec.edge_softness_frac = args.edge_softness_frac;
  spec.noise_hu_sigma = args.noise_sigma;
  spec.spacing_mm = args.spacing;
  spec.validate();
  if (args.n_masks < 2) {
    throw voxmat::InvalidArgument("phantom: need at least 2 masks");
  }

  const auto set = voxmat::make_phantom(spec, args.n_masks);
  fs::create_directories(args.out_dir);
  const auto stem = [&](const std::string& name) {
    return (fs::path(args.out_dir) / name).string();
  };
  voxmat::write_volume(set.image, stem("image"));
  voxmat::write_volume(set.gt_alpha, stem("gt_alpha"));
  voxmat::write_volume(set.fg, stem("fg"));
  voxmat::write_volume(set.bg, stem("bg"));
  ordered_json manifest;
  manifest["spec"] = {{"size", spec.size},
                      {"seed", spec.seed},
                      {"fg_hu_range", {spec.fg_hu_lo, spec.fg_hu_hi}},
                      {"bg_hu_range", {spec.bg_hu_lo, spec.bg_hu_hi}},
                      {"blob_radius_frac", spec.blob_radius_frac},
                      {"edge_softness_frac", spec.edge_softness_frac},
                      {"noise_hu_sigma", spec.noise_hu_sigma},
                      {"spacing_mm", spec.spacing_mm},
                      {"n_masks", args.n_masks}};
  manifest["files"] = {{"image", stem("image")},
                       {"gt_alpha", stem("gt_alpha")},
                       {"fg", stem("fg")},
                       {"bg", stem("bg")}};
  ordered_json mask_list = ordered_json::array();
  for (int j = 0; j < args.n_masks; ++j) {
    const std::string mask_stem = stem("mask_" + std::to_string(j));
    voxmat::write_volume(set.masks[static_cast<std::size_t>(j)], mask_stem);
    mask_list.push_back(mask_stem);
  }
  manifest["files"]["masks"] = mask_list;
  write_text(fs::path(args.out_dir) / "manifest.json", manifest.dump(2) + "\n");
  std::cout << "phantom written to " << args.out_dir << " (" << spec.size
            << "^3, " << args.n_masks << " masks)\n";
  return kExitOk;
}

struct TrimapArgs {
  std::vector<std::string> masks;
  std::string out;
  int dilate_radius = 3;
};

int cmd_trimap(const TrimapArgs& args) {
  std::vector<voxmat::LabelMask> masks;
  masks.reserve(args.masks.size());
  for (const auto& stem : args.masks) {
    masks.push_back(voxmat::read_mask(stem));
  }
  const auto fused = voxmat::fuse_masks(masks);
  const voxmat::Trimap trimap =
      voxmat::build_trimap(fused.overlap, fused.union_mask, args.dilate_radius);
  voxmat::write_volume(trimap, args.out);

  std::int64_t fg = 0, unk = 0, bg = 0;
  for (auto v : trimap.values) {
    if (v == static_cast<std::uint8_t>(voxmat::TrimapLabel::Foreground)) ++fg;
    else if (v == static_cast<std::uint8_t>(voxmat::TrimapLabel::Unknown)) ++unk;
    else ++bg;
  }
  std::cout << "FG=" << fg << " UNK=" << unk << " BG=" << bg << "\n";
  return kExitOk;
}

struct MatArgs {
  std::string method = "cf";
  bool calibrated = false;
  std::string image;
  std::string trimap;
  std::string out;
  std::string window = "-1350:150";
  double lambda = 100.0;
  int cf_window_k = 3;
  double cf_epsilon = 1e-7;
  int knn_k = 10;
  double knn_spatial_weight = 1.0;
  double tol = 1e-7;
  int max_iterations = 2000;
  std::string debug_constraints;
};

voxmat::MattingConfig matting_config(const MatArgs& args) {
  voxmat::MattingConfig cfg;
  cfg.method = args.method == "knn" ? voxmat::MattingMethod::KNN
                                    : voxmat::MattingMethod::CF;
  cfg.calibrated = args.calibrated;
  cfg.lambda = args.lambda;
  std::tie(cfg.window_min_hu, cfg.window_max_hu) = parse_window(args.window);
  cfg.cf.window_k = args.cf_window_k;
  cfg.cf.epsilon = args.cf_epsilon;
  cfg.knn.k_neighbors = args.knn_k;
  cfg.knn.spatial_weight = args.knn_spatial_weight;
  cfg.solve.tol_rel_residual = args.tol;
  cfg.solve.max_iterations = args.max_iterations;
  return cfg;
}

void dump_constraints(const voxmat::SoftConstraint& c, const fs::path& path) {
  ordered_json j;
  j["lambda"] = c.lambda;
  j["constrained"] = c.constrained;
  j["s_values"] = c.s_values;
  write_text(path, j.dump() + "\n");
}

int cmd_mat(const MatArgs& args) {
  const voxmat::VolumeGrid image = voxmat::read_image(args.image);
  const voxmat::Trimap trimap = voxmat::read_trimap(args.trimap);
  const voxmat::MattingConfig cfg = matting_config(args);

  if (!args.debug_constraints.empty()) {
    const voxmat::SoftConstraint c =
        cfg.calibrated
            ? voxmat::hu_calibrated_constraints(
                  image, trimap,
                  voxmat::HuCalibration::from_window(cfg.window_min_hu,
                                                     cfg.window_max_hu),
                  cfg.lambda)
            : voxmat::binary_constraints(trimap, cfg.lambda);
    dump_constraints(c, args.debug_constraints);
  }

  const auto [matte, report] = voxmat::solve_alpha(image, trimap, cfg);
  voxmat::write_volume(matte, args.out);
  ordered_json rj = report_to_json(report);
  rj["method"] = args.method;
  rj["calibrated"] = args.calibrated;
  write_text(args.out + ".report.json", rj.dump(2) + "\n");
  std::cout << (report.converged ? "converged" : "NOT converged") << " in "
            << report.iterations << " iterations, residual "
            << report.final_rel_residual << "\n";
  return report.converged ? kExitOk : kExitNotConverged;
}

struct EvalArgs {
  std::vector<std::string> pred;
  std::vector<std::string> gt;
  bool aggregate = false;
  std::string out;
  double grad_sigma = 1.4;
  double conn_theta_step = 0.1;
  double conn_delta = 0.15;
};

ordered_json eval_to_json(const EvalArgs& args) {
  if (args.pred.size() != args.gt.size() || args.pred.empty()) {
    throw voxmat::InvalidArgument(
        "eval: --pred and --gt need the same nonzero number of stems");
  }
  ordered_json j;
  j["cases"] = ordered_json::array();
  std::vector<voxmat::MatteMetrics> cases;
  for (std::size_t i = 0; i < args.pred.size(); ++i) {
    const voxmat::AlphaMatte pred = voxmat::read_alpha(args.pred[i]);
    const voxmat::AlphaMatte gt = voxmat::read_alpha(args.gt[i]);
    const voxmat::MatteMetrics m = voxmat::compute_metrics(
        pred, gt, args.grad_sigma, {args.conn_theta_step, args.conn_delta});
    cases.push_back(m);
    ordered_json cj = metrics_to_json(m);
    cj["pred"] = args.pred[i];
    cj["gt"] = args.gt[i];
    j["cases"].push_back(cj);
  }
  if (args.aggregate) {
    const auto rep = voxmat::aggregate(cases);
    const auto stat_json = [](const voxmat::MetricStat& s,
                              const std::string& formatted) {
      return ordered_json{
          {"mean", s.mean}, {"std", s.std_dev}, {"formatted", formatted}};
    };
    j["aggregate"] = {{"sad", stat_json(rep.sad, rep.sad_formatted())},
                      {"mse", stat_json(rep.mse, rep.mse_formatted())},
                      {"grad", stat_json(rep.grad, rep.grad_formatted())},
                      {"conn", stat_json(rep.conn, rep.conn_formatted())}};
  }
  return j;
}

int cmd_eval(const EvalArgs& args) {
  const ordered_json j = eval_to_json(args);
  const std::string text = j.dump(2) + "\n";
  if (!args.out.empty()) {
    write_text(args.out, text);
  }
  std::cout << text;
  return kExitOk;
}

struct PipelineArgs {
  std::string image;
  std::vector<std::string> masks;
  std::string out_dir;
  std::string gt;
  std::string methods = "cf,knn";
  double target_spacing = 0.5;
  int crop_xy = 128;  // 0 disables cropping
  int z_pad = 3;
  double crop_fill = -1000.0;
  int dilate_radius = 3;
  MatArgs solver;  // shared solver/window/lambda flags
};

struct VariantOutcome {
  std::string name;
  std::string method;
  bool calibrated = false;
  voxmat::AlphaMatte matte;
  voxmat::SolveReport report;
  std::string error;
};

std::vector<std::string> parse_methods(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    if (token != "cf" && token != "knn") {
      throw voxmat::InvalidArgument("unknown method '" + token +
                                    "' (expected cf or knn)");
    }
    if (std::find(out.begin(), out.end(), token) == out.end()) {
      out.push_back(token);
    }
  }
  if (out.empty()) {
    throw voxmat::InvalidArgument("no methods selected");
  }
  return out;
}

// One method group: the Laplacian is built once and shared by the plain and
// calibrated variants.
void run_method_group(const std::string& method,
                      const voxmat::VolumeGrid& image,
                      const voxmat::Trimap& trimap,
                      const voxmat::MattingConfig& base,
                      std::vector<VariantOutcome>& out) {
  const voxmat::VolumeGrid normalized =
      voxmat::clamp_window(image, base.window_min_hu, base.window_max_hu);
  voxmat::SparseSymMatrix L;
  if (method == "cf") {
    L = voxmat::build_cf_laplacian(normalized, base.cf);
  } else {
    const voxmat::FeatureArray f =
        voxmat::build_features(normalized, base.knn.spatial_weight);
    const auto neighbors = voxmat::knn_graph(f, base.knn.k_neighbors);
    L = voxmat::build_knn_laplacian(f, neighbors, base.knn.k_neighbors);
  }
  for (const bool calibrated : {false, true}) {
    VariantOutcome& slot = out.emplace_back();
    slot.name = calibrated ? method + "+" : method;
    slot.method = method;
    slot.calibrated = calibrated;
    try {
      const voxmat::SoftConstraint constraints =
          calibrated ? voxmat::hu_calibrated_constraints(
                           image, trimap,
                           voxmat::HuCalibration::from_window(
                               base.window_min_hu, base.window_max_hu),
                           base.lambda)
                     : voxmat::binary_constraints(trimap, base.lambda);
      if (constraints.constrained_count() == 0) {
        throw voxmat::SingularSystem("trimap constrains no voxels");
      }
      auto [A, b] = voxmat::assemble_system(L, constraints);
      auto [x, report] = voxmat::pcg_solve(A, b, base.solve);
      slot.report = report;
      slot.matte.dims = image.dims;
      slot.matte.spacing = image.spacing;
      slot.matte.values.resize(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        slot.matte.values[i] = static_cast<float>(std::clamp(x[i], 0.0, 1.0));
      }
    } catch (const std::exception& e) {
      slot.error = e.what();
    }
  }
}

int cmd_pipeline(const PipelineArgs& args) {
  fs::create_directories(args.out_dir);
  const auto out_stem = [&](const std::string& name) {
    return (fs::path(args.out_dir) / name).string();
  };
  const auto methods = parse_methods(args.methods);
  const voxmat::MattingConfig base = matting_config(args.solver);

  ordered_json manifest;
  manifest["inputs"] = {{"image", args.image},
                        {"masks", args.masks},
                        {"gt", args.gt.empty() ? ordered_json(nullptr)
                                               : ordered_json(args.gt)}};
  ordered_json errors = ordered_json::array();
  int exit_code = kExitOk;

  try {
    voxmat::VolumeGrid image = voxmat::read_image(args.image);
    if (image.unit != voxmat::Unit::HU) {
      throw voxmat::InvalidArgument("pipeline expects an HU image");
    }
    std::vector<voxmat::LabelMask> masks;
    for (const auto& stem : args.masks) masks.push_back(voxmat::read_mask(stem));
    std::optional<voxmat::AlphaMatte> gt;
    if (!args.gt.empty()) gt = voxmat::read_alpha(args.gt);

    // resample everything onto the isotropic grid (trilinear for the image
    // and the continuous gt field, nearest-neighbor for label masks)
    image = voxmat::resample_to_isotropic(image, args.target_spacing);
    for (auto& m : masks) {
      m = voxmat::resample_mask_to_isotropic(m, args.target_spacing);
      voxmat::require_same_shape(image, m, "pipeline");
    }
    if (gt) {
      voxmat::VolumeGrid as_vol;
      as_vol.dims = gt->dims;
      as_vol.spacing = gt->spacing;
      as_vol.values = gt->values;
      as_vol.unit = voxmat::Unit::Normalized;
      const voxmat::VolumeGrid res =
          voxmat::resample_to_isotropic(as_vol, args.target_spacing);
      gt->dims = res.dims;
      gt->spacing = res.spacing;
      gt->values = res.values;
    }

    ordered_json preprocessing;
    preprocessing["target_spacing_mm"] = args.target_spacing;
    preprocessing["resampled_dims"] = image.dims;

    // crop around the union-mask centroid
    if (args.crop_xy > 0) {
      const auto pre_fused = voxmat::fuse_masks(masks);
      std::int64_t cx = 0, cy = 0, count = 0;
      int z_lo = image.dims[2], z_hi = -1;
      std::int64_t i = 0;
      for (int z = 0; z < image.dims[2]; ++z)
        for (int y = 0; y < image.dims[1]; ++y)
          for (int x = 0; x < image.dims[0]; ++x, ++i) {
            if (!pre_fused.union_mask.values[i]) continue;
            cx += x;
            cy += y;
            ++count;
            z_lo = std::min(z_lo, z);
            z_hi = std::max(z_hi, z);
          }
      if (count == 0) {
        throw voxmat::InvalidArgument("pipeline: union mask is empty");
      }
      const int center_x = static_cast<int>(cx / count);
      const int center_y = static_cast<int>(cy / count);
      image = voxmat::crop_centered(image, center_x, center_y, args.crop_xy,
                                    z_lo, z_hi, args.z_pad,
                                    static_cast<float>(args.crop_fill));
      for (auto& m : masks) {
        m = voxmat::crop_centered(m, center_x, center_y, args.crop_xy, z_lo,
                                  z_hi, args.z_pad, std::uint8_t{0});
      }
      if (gt) {
        gt = voxmat::crop_centered(*gt, center_x, center_y, args.crop_xy, z_lo,
                                   z_hi, args.z_pad, 0.0f);
      }
      preprocessing["crop"] = {{"applied", true},
                               {"xy_size", args.crop_xy},
                               {"z_pad", args.z_pad},
                               {"center_xy", {center_x, center_y}},
                               {"z_range", {z_lo, z_hi}},
                               {"fill_hu", args.crop_fill}};
      preprocessing["cropped_dims"] = image.dims;
    } else {
      preprocessing["crop"] = {{"applied", false}};
    }

    const auto fused = voxmat::fuse_masks(masks);
    const voxmat::Trimap trimap = voxmat::build_trimap(
        fused.overlap, fused.union_mask, args.dilate_radius);
    std::int64_t fg = 0, unk = 0, bg = 0;
    for (auto v : trimap.values) {
      if (v == 2) ++fg;
      else if (v == 1) ++unk;
      else ++bg;
    }
    preprocessing["dilate_radius_vox"] = args.dilate_radius;
    preprocessing["window_hu"] = {base.window_min_hu, base.window_max_hu};
    preprocessing["lambda"] = base.lambda;
    preprocessing["trimap_counts"] = {{"fg", fg}, {"unk", unk}, {"bg", bg}};
    manifest["preprocessing"] = preprocessing;

    voxmat::write_volume(trimap, out_stem("trimap"));
    if (gt) {
      voxmat::write_volume(*gt, out_stem("gt"));
      manifest["gt_processed"] = out_stem("gt");
    }

    // method groups run concurrently; each shares one Laplacian between its
    // plain and calibrated variants
    std::vector<std::vector<VariantOutcome>> groups(methods.size());
    {
      std::vector<std::thread> workers;
      workers.reserve(methods.size());
      for (std::size_t g = 0; g < methods.size(); ++g) {
        workers.emplace_back([&, g] {
          try {
            run_method_group(methods[g], image, trimap, base, groups[g]);
          } catch (const std::exception& e) {
            VariantOutcome bad;
            bad.name = methods[g];
            bad.method = methods[g];
            bad.error = e.what();
            groups[g].clear();
            groups[g].push_back(std::move(bad));
          }
        });
      }
      for (auto& w : workers) w.join();
    }

    ordered_json candidates = ordered_json::array();
    for (const auto& group : groups) {
      for (const auto& variant : group) {
        ordered_json cj;
        cj["name"] = variant.name;
        cj["method"] = variant.method;
        cj["calibrated"] = variant.calibrated;
        if (!variant.error.empty()) {
          cj["error"] = variant.error;
          errors.push_back(
              {{"stage", variant.name}, {"message", variant.error}});
          exit_code = kExitUnexpected;
          candidates.push_back(cj);
          continue;
        }
        const std::string stem = out_stem(variant.name);
        voxmat::write_volume(variant.matte, stem);
        write_montage_pgm(variant.matte,
                          fs::path(out_stem(variant.name + "_montage.pgm")));
        cj["alpha"] = stem;
        cj["montage"] = out_stem(variant.name + "_montage.pgm");
        cj["report"] = report_to_json(variant.report);
        if (!variant.report.converged && exit_code == kExitOk) {
          exit_code = kExitNotConverged;
        }
        if (gt) {
          cj["metrics"] =
              metrics_to_json(voxmat::compute_metrics(variant.matte, *gt));
        }
        candidates.push_back(cj);
      }
    }
    manifest["candidates"] = candidates;
  } catch (const voxmat::Error& e) {
    errors.push_back({{"stage", "pipeline"}, {"message", e.what()}});
    exit_code = kExitUsage;
  } catch (const std::exception& e) {
    errors.push_back({{"stage", "pipeline"}, {"message", e.what()}});
    exit_code = kExitUnexpected;
  }

  manifest["errors"] = errors;
  write_text(fs::path(args.out_dir) / "manifest.json", manifest.dump(2) + "\n");
  if (exit_code == kExitOk) {
    std::cout << "pipeline complete: " << args.out_dir << "/manifest.json\n";
  } else {
    std::cerr << "pipeline finished with errors (see manifest)\n";
  }
  return exit_code;
}

void add_solver_flags(CLI::App* cmd, MatArgs& args) {
  cmd->add_option("--window", args.window,
                  "CT window as w_min:w_max in HU (default -1350:150)");
  cmd->add_option("--lambda", args.lambda, "constraint weight");
  cmd->add_option("--cf-window-k", args.cf_window_k,
                  "closed-form window edge length (odd, >= 3)");
  cmd->add_option("--cf-epsilon", args.cf_epsilon,
                  "closed-form variance regularizer");
  cmd->add_option("--knn-k", args.knn_k, "KNN neighbor count");
  cmd->add_option("--knn-spatial-weight", args.knn_spatial_weight,
                  "KNN spatial coordinate weight");
  cmd->add_option("--tol", args.tol, "PCG relative residual tolerance");
  cmd->add_option("--max-iterations", args.max_iterations,
                  "PCG iteration cap");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"voxmat: volumetric image matting for CT lesions"};
  app.require_subcommand(1);

  PhantomArgs phantom_args;
  auto* phantom = app.add_subcommand(
      "phantom", "generate a synthetic compositing phantom set");
  phantom->add_option("--out-dir", phantom_args.out_dir)->required();
  phantom->add_option("--size", phantom_args.size, "cube edge voxels (>= 16)");
  phantom->add_option("--seed", phantom_args.seed);
  phantom->add_option("--n-masks", phantom_args.n_masks,
                      "simulated annotator count");
  phantom->add_option("--fg-range", phantom_args.fg_range,
                      "foreground HU range lo:hi");
  phantom->add_option("--bg-range", phantom_args.bg_range,
                      "background HU range lo:hi");
  phantom->add_option("--blob-radius-frac", phantom_args.blob_radius_frac);
  phantom->add_option("--edge-softness-frac", phantom_args.edge_softness_frac);
  phantom->add_option("--noise-sigma", phantom_args.noise_sigma,
                      "additive HU noise sigma");
  phantom->add_option("--spacing", phantom_args.spacing, "voxel spacing mm");

  TrimapArgs trimap_args;
  auto* trimap = app.add_subcommand(
      "trimap", "fuse annotator masks and build a dilated trimap");
  trimap->add_option("--masks", trimap_args.masks, "mask stems (>= 2)")
      ->required()
      ->expected(-1);
  trimap->add_option("--out", trimap_args.out)->required();
  trimap->add_option("--dilate-radius", trimap_args.dilate_radius,
                     "unknown-band dilation radius in voxels");

  MatArgs mat_args;
  auto* mat = app.add_subcommand("mat", "solve an alpha matte");
  mat->add_option("--method", mat_args.method, "cf or knn")
      ->check(CLI::IsMember({"cf", "knn"}));
  mat->add_flag("--calibrated", mat_args.calibrated,
                "HU-calibrated foreground constraints (the + variants)");
  mat->add_option("--image", mat_args.image)->required();
  mat->add_option("--trimap", mat_args.trimap)->required();
  mat->add_option("--out", mat_args.out)->required();
  mat->add_option("--debug-constraints", mat_args.debug_constraints,
                  "dump the (S, D, lambda) triple to this JSON path");
  add_solver_flags(mat, mat_args);

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "score mattes against ground truth");
  eval->add_option("--pred", eval_args.pred)->required()->expected(-1);
  eval->add_option("--gt", eval_args.gt)->required()->expected(-1);
  eval->add_flag("--aggregate", eval_args.aggregate,
                 "add the mean(±std) aggregate block");
  eval->add_option("--out", eval_args.out, "write the JSON report here too");
  eval->add_option("--grad-sigma", eval_args.grad_sigma);
  eval->add_option("--conn-theta-step", eval_args.conn_theta_step);
  eval->add_option("--conn-delta", eval_args.conn_delta);

  PipelineArgs pipeline_args;
  auto* pipeline = app.add_subcommand(
      "pipeline", "resample, crop, trimap, then run all method variants");
  pipeline->add_option("--image", pipeline_args.image)->required();
  pipeline->add_option("--masks", pipeline_args.masks)->required()->expected(-1);
  pipeline->add_option("--out-dir", pipeline_args.out_dir)->required();
  pipeline->add_option("--gt", pipeline_args.gt,
                       "ground-truth alpha stem for candidate metrics");
  pipeline->add_option("--methods", pipeline_args.methods,
                       "comma list of methods (cf,knn)");
  pipeline->add_option("--target-spacing", pipeline_args.target_spacing,
                       "isotropic resample spacing mm");
  pipeline->add_option("--crop-xy", pipeline_args.crop_xy,
                       "transverse crop size (0 = no crop)");
  pipeline->add_option("--z-pad", pipeline_args.z_pad,
                       "slice padding at both z ends");
  pipeline->add_option("--crop-fill", pipeline_args.crop_fill,
                       "fill HU outside the source");
  pipeline->add_option("--dilate-radius", pipeline_args.dilate_radius);
  add_solver_flags(pipeline, pipeline_args.solver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(phantom)) return cmd_phantom(phantom_args);
    if (app.got_subcommand(trimap)) return cmd_trimap(trimap_args);
    if (app.got_subcommand(mat)) return cmd_mat(mat_args);
    if (app.got_subcommand(eval)) return cmd_eval(eval_args);
    if (app.got_subcommand(pipeline)) return cmd_pipeline(pipeline_args);
  } catch (const voxmat::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kExitUnexpected;
  }
  return kExitUsage;
}
