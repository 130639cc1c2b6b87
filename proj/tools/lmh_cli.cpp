// lmh: command-line front end. Every subcommand reads meshes and plain-text
// inputs, writes its artifacts into --out, and prints a JSON summary.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lmh/errors.hpp"
#include "lmh/fmap.hpp"
#include "lmh/io.hpp"
#include "lmh/lmh.hpp"
#include "lmh/mesh.hpp"
#include "lmh/shapes.hpp"
#include "lmh/spectral.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace lmh;

namespace {

struct Common {
  std::string out = ".";
  std::string solver = "relaxed";
  std::uint64_t seed = 20180501;
};

struct RegionInput {
  std::string path;
  std::vector<int> seeds;
  std::optional<double> variance;
};

SolveOptions solve_options(const Common& common) {
  SolveOptions options;
  if (common.solver == "hard") options.path = SolverPath::Hard;
  else if (common.solver == "oracle") options.path = SolverPath::Oracle;
  options.krylov.seed = common.seed;
  return options;
}

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--out", common.out, "Output directory (created if missing)");
  cmd->add_option("--solver", common.solver, "Solver path")
      ->check(CLI::IsMember({"relaxed", "hard", "oracle"}));
  cmd->add_option("--seed", common.seed, "Seed for the iterative solver's start block");
}

void add_region(CLI::App* cmd, RegionInput& input, const std::string& prefix = "") {
  auto* path = cmd->add_option("--" + prefix + "region", input.path, "Region file: one membership value per vertex")
                   ->check(CLI::ExistingFile);
  auto* seeds =
      cmd->add_option("--" + prefix + "seeds", input.seeds, "Seed vertices for a soft region (comma separated)")
          ->delimiter(',');
  cmd->add_option("--" + prefix + "variance", input.variance, "Variance of the soft region around the seeds")
      ->check(CLI::PositiveNumber);
  path->excludes(seeds);
}

Region load_region(const RegionInput& input, const TriMesh& mesh, const std::string& what = "--region or --seeds") {
  if (!input.path.empty()) {
    std::istringstream in(io::read_file(input.path));
    return io::read_region(in, mesh.num_vertices());
  }
  if (!input.seeds.empty()) return soft_region_from_seeds(mesh, input.seeds, input.variance);
  throw InvalidInput("a region is required: pass " + what);
}

fs::path prepare(const Common& common) {
  const fs::path dir(common.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InvalidInput("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

template <typename Writer>
void save(const fs::path& path, Writer&& writer) {
  std::ostringstream out;
  writer(out);
  io::write_file(path, out.str());
}

void save_basis(const fs::path& dir, const SpectralBasis& basis) {
  save(dir / "basis.txt", [&](std::ostream& out) { io::write_matrix(out, basis.functions); });
  save(dir / "spectrum.txt", [&](std::ostream& out) { io::write_vector(out, basis.spectrum); });
}

std::vector<double> to_list(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void report(const fs::path& dir, const json& summary) {
  io::write_file(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
}

double orthonormality_error(const Eigen::MatrixXd& psi, const Eigen::VectorXd& mass) {
  const Eigen::MatrixXd g = psi.transpose() * mass.asDiagonal() * psi;
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

// Basis used on both sides of a correspondence: k MH functions, or k' MH plus
// the LMH of a region when --lmh-k is given.
struct MapBasis {
  int k = 30;
  int kprime = 20;
  int lmh_k = 0;
  double mu_R = kDefaultMuR;
  std::optional<double> mu_perp;
  RegionInput region_x;
  RegionInput region_y;
};

void add_map_basis(CLI::App* cmd, MapBasis& basis) {
  cmd->add_option("--k", basis.k, "MH functions when no LMH block is requested")->check(CLI::PositiveNumber);
  cmd->add_option("--kprime", basis.kprime, "MH functions kept next to the LMH block")->check(CLI::NonNegativeNumber);
  cmd->add_option("--lmh-k", basis.lmh_k, "LMH functions per shape (0: plain MH)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--mu-r", basis.mu_R, "Locality weight")->check(CLI::NonNegativeNumber);
  cmd->add_option("--mu-perp", basis.mu_perp, "Orthogonality weight")->check(CLI::NonNegativeNumber);
  add_region(cmd, basis.region_x, "x-");
  add_region(cmd, basis.region_y, "y-");
}

Eigen::MatrixXd map_basis(const TriMesh& mesh, const Discretization& disc, const MapBasis& spec,
                          const RegionInput& region, const SolveOptions& options) {
  if (spec.lmh_k == 0) return compute_mh(disc, spec.k, options).functions;
  const SpectralBasis global = compute_mh(disc, std::max(spec.kprime, 1), options);
  LmhParams params;
  params.k = spec.lmh_k;
  params.kprime = spec.kprime;
  params.mu_R = spec.mu_R;
  params.mu_perp = spec.mu_perp;
  const SpectralBasis local =
      compute_lmh(disc, load_region(region, mesh, "--x-region/--y-region or seeds"), params, options, &global);
  Eigen::MatrixXd out(disc.size(), spec.kprime + spec.lmh_k);
  out << global.functions.leftCols(spec.kprime), local.functions;
  return out;
}

PointMap load_map(const std::string& path) {
  std::istringstream in(io::read_file(path));
  return io::read_point_map(in);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Localized manifold harmonics: bases, spectral checks, reconstruction and correspondence"};
  app.require_subcommand(1);
  Common common;

  std::string mesh_path;
  int k = 10;
  int kprime = 0;
  double mu_R = kDefaultMuR;
  std::optional<double> mu_perp;
  RegionInput region;

  // mh
  auto* mh = app.add_subcommand("mh", "Manifold harmonics: the k smallest Laplace-Beltrami eigenpairs");
  add_common(mh, common);
  mh->add_option("--mesh", mesh_path, "Mesh (.off or .obj)")->required()->check(CLI::ExistingFile);
  mh->add_option("--k", k, "Number of eigenpairs")->check(CLI::PositiveNumber);
  mh->callback([&] {
    const TriMesh mesh = read_mesh(mesh_path);
    const fs::path dir = prepare(common);
    const SpectralBasis basis = compute_mh(mesh, k, solve_options(common));
    save_basis(dir, basis);
    report(dir, {{"command", "mh"}, {"vertices", mesh.num_vertices()}, {"spectrum", to_list(basis.spectrum)}});
  });

  // lmh
  auto* lmh_cmd = app.add_subcommand("lmh", "Localized manifold harmonics on a region");
  add_common(lmh_cmd, common);
  lmh_cmd->add_option("--mesh", mesh_path, "Mesh (.off or .obj)")->required()->check(CLI::ExistingFile);
  add_region(lmh_cmd, region);
  lmh_cmd->add_option("--k", k, "Number of localized functions")->check(CLI::PositiveNumber);
  lmh_cmd->add_option("--kprime", kprime, "Global MH functions to stay orthogonal to")->check(CLI::NonNegativeNumber);
  lmh_cmd->add_option("--mu-r", mu_R, "Locality weight")->check(CLI::NonNegativeNumber);
  lmh_cmd->add_option("--mu-perp", mu_perp, "Orthogonality weight")->check(CLI::NonNegativeNumber);
  lmh_cmd->callback([&] {
    const TriMesh mesh = read_mesh(mesh_path);
    const Region r = load_region(region, mesh);
    const fs::path dir = prepare(common);
    const SolveOptions options = solve_options(common);
    const Discretization disc = discretize(mesh);
    const SpectralBasis global = compute_mh(disc, std::max(kprime, 1), options);
    LmhParams params;
    params.k = k;
    params.kprime = kprime;
    params.mu_R = mu_R;
    params.mu_perp = mu_perp;
    const SpectralBasis basis = compute_lmh(disc, r, params, options, &global);
    save_basis(dir, basis);
    const Eigen::MatrixXd phi = global.functions.leftCols(kprime);
    const double leak =
        kprime > 0 ? (phi.transpose() * disc.mass.asDiagonal() * basis.functions).cwiseAbs().maxCoeff() : 0.0;
    report(dir, {{"command", "lmh"},
                 {"vertices", mesh.num_vertices()},
                 {"spectrum", to_list(basis.spectrum)},
                 {"mu_perp", basis.params.mu_perp},
                 {"orthonormality_error", orthonormality_error(basis.functions, disc.mass)},
                 {"max_abs_phi_t_a_psi", leak},
                 {"energy_inside", to_list(energy_fraction_inside(basis.functions, disc.mass, r))},
                 {"warnings", basis.warnings}});
  });

  // pmh
  auto* pmh = app.add_subcommand("pmh", "Partial manifold harmonics of a binary region, zero-padded");
  add_common(pmh, common);
  pmh->add_option("--mesh", mesh_path, "Mesh (.off or .obj)")->required()->check(CLI::ExistingFile);
  add_region(pmh, region);
  pmh->add_option("--k", k, "Number of eigenpairs")->check(CLI::PositiveNumber);
  pmh->callback([&] {
    const TriMesh mesh = read_mesh(mesh_path);
    const Region r = load_region(region, mesh);
    const fs::path dir = prepare(common);
    const SpectralBasis basis = compute_pmh(mesh, r, k, solve_options(common));
    save_basis(dir, basis);
    report(dir, {{"command", "pmh"}, {"spectrum", to_list(basis.spectrum)}, {"warnings", basis.warnings}});
  });

  // region
  auto* region_cmd = app.add_subcommand("region", "Soft region from seed vertices");
  add_common(region_cmd, common);
  region_cmd->add_option("--mesh", mesh_path, "Mesh (.off or .obj)")->required()->check(CLI::ExistingFile);
  region_cmd->add_option("--seeds", region.seeds, "Seed vertices (comma separated)")->required()->delimiter(',');
  region_cmd->add_option("--variance", region.variance, "Variance around the seeds")->check(CLI::PositiveNumber);
  region_cmd->callback([&] {
    const TriMesh mesh = read_mesh(mesh_path);
    const Region r = soft_region_from_seeds(mesh, region.seeds, region.variance);
    const fs::path dir = prepare(common);
    save(dir / "region.u", [&](std::ostream& out) { io::write_region(out, r); });
    const auto inside = r.inside();
    report(dir, {{"command", "region"},
                 {"vertices", mesh.num_vertices()},
                 {"inside", std::count(inside.begin(), inside.end(), true)},
                 {"mean_membership", r.membership().mean()}});
  });

  // gap
  auto* gap = app.add_subcommand("gap", "Check lambda_k'(W) <= lambda_1(Q)");
  add_common(gap, common);
  gap->add_option("--mesh", mesh_path, "Mesh (.off or .obj)")->required()->check(CLI::ExistingFile);
  add_region(gap, region);
  gap->add_option("--kprime", kprime, "Global MH functions")->check(CLI::PositiveNumber);
  gap->add_option("--mu-r", mu_R, "Locality weight")->check(CLI::NonNegativeNumber);
  gap->add_option("--mu-perp", mu_perp, "Orthogonality weight")->check(CLI::NonNegativeNumber);
  gap->callback([&] {
    const TriMesh mesh = read_mesh(mesh_path);
    const Region r = load_region(region, mesh);
    const fs::path dir = prepare(common);
    const GapReport g = verify_spectral_gap(mesh, r, kprime, mu_R, mu_perp, solve_options(common));
    report(dir, {{"command", "gap"},
                 {"lambda_kprime_w", g.lambda_kprime_w},
                 {"lambda_next_w", g.lambda_next_w},
                 {"lambda1_q", g.lambda1_q},
                 {"gap", g.gap},
                 {"mu_perp", g.mu_perp},
                 {"passed", g.passed},
                 {"warnings", g.warnings}});
  });

  // bound
  double bound_mu_R = kUpperBoundMuR;
  double bound_mu_perp = kDefaultMuPerp;
  auto* bound = app.add_subcommand("bound", "Compare lambda_i(Q) with lambda_{i+k'}(W^R) on a binary region");
  add_common(bound, common);
  bound->add_option("--mesh", mesh_path, "Mesh (.off or .obj)")->required()->check(CLI::ExistingFile);
  add_region(bound, region);
  bound->add_option("--k", k, "Number of eigenvalues compared")->check(CLI::PositiveNumber);
  bound->add_option("--kprime", kprime, "Global MH functions")->check(CLI::NonNegativeNumber);
  bound->add_option("--mu-r", bound_mu_R, "Locality weight")->check(CLI::NonNegativeNumber);
  bound->add_option("--mu-perp", bound_mu_perp, "Orthogonality weight")->check(CLI::NonNegativeNumber);
  bound->callback([&] {
    const TriMesh mesh = read_mesh(mesh_path);
    const Region r = load_region(region, mesh);
    const fs::path dir = prepare(common);
    const BoundReport b = verify_upper_bound(mesh, r, kprime, k, bound_mu_R, bound_mu_perp, solve_options(common));
    report(dir, {{"command", "bound"},
                 {"lmh_spectrum", to_list(b.lmh_spectrum)},
                 {"partial_spectrum", to_list(b.partial_spectrum)},
                 {"max_violation", b.max_violation},
                 {"passed", b.passed}});
  });

  // weyl
  auto* weyl = app.add_subcommand("weyl", "Linear fit of the LMH eigenvalue growth");
  add_common(weyl, common);
  weyl->add_option("--mesh", mesh_path, "Mesh (.off or .obj)")->required()->check(CLI::ExistingFile);
  add_region(weyl, region);
  weyl->add_option("--k", k, "Number of localized functions")->check(CLI::PositiveNumber);
  weyl->add_option("--kprime", kprime, "Global MH functions")->check(CLI::NonNegativeNumber);
  weyl->add_option("--mu-r", mu_R, "Locality weight")->check(CLI::NonNegativeNumber);
  weyl->add_option("--mu-perp", mu_perp, "Orthogonality weight")->check(CLI::NonNegativeNumber);
  weyl->callback([&] {
    const TriMesh mesh = read_mesh(mesh_path);
    const Region r = load_region(region, mesh);
    const fs::path dir = prepare(common);
    LmhParams params;
    params.k = k;
    params.kprime = kprime;
    params.mu_R = mu_R;
    params.mu_perp = mu_perp;
    const SpectralBasis basis = compute_lmh(mesh, r, params, solve_options(common));
    const Eigen::VectorXd binary = r.membership().unaryExpr([](double u) { return u == 1.0 ? 1.0 : 0.0; });
    const WeylFit fit = weyl_slope(basis, surface_area(mesh, binary));
    save(dir / "spectrum.txt", [&](std::ostream& out) { io::write_vector(out, basis.spectrum); });
    report(dir, {{"command", "weyl"},
                 {"slope", fit.slope},
                 {"r_squared", fit.r_squared},
                 {"normalized_slope", fit.normalized_slope}});
  });

  // reconstruct
  int lmh_k = 0;
  auto* rec = app.add_subcommand("reconstruct", "Reconstruct the embedding from MH, optionally plus region LMH");
  add_common(rec, common);
  rec->add_option("--mesh", mesh_path, "Mesh (.off or .obj)")->required()->check(CLI::ExistingFile);
  rec->add_option("--k", k, "MH functions")->check(CLI::PositiveNumber);
  rec->add_option("--lmh-k", lmh_k, "LMH functions on the region (0: MH only)")->check(CLI::NonNegativeNumber);
  add_region(rec, region);
  rec->add_option("--mu-r", mu_R, "Locality weight")->check(CLI::NonNegativeNumber);
  rec->add_option("--mu-perp", mu_perp, "Orthogonality weight")->check(CLI::NonNegativeNumber);
  rec->callback([&] {
    const TriMesh mesh = read_mesh(mesh_path);
    const fs::path dir = prepare(common);
    const SolveOptions options = solve_options(common);
    const Discretization disc = discretize(mesh);
    std::vector<SpectralBasis> bases{compute_mh(disc, k, options)};
    if (lmh_k > 0) {
      LmhParams params;
      params.k = lmh_k;
      params.kprime = k;
      params.mu_R = mu_R;
      params.mu_perp = mu_perp;
      bases.push_back(compute_lmh(disc, load_region(region, mesh), params, options, &bases.front()));
    }
    const Reconstruction r = reconstruct_surface(mesh, disc.mass, bases);
    const ReconstructionError err = reconstruction_error(mesh, r.coordinates);
    io::write_file(dir / "reconstruction.off", to_off(mesh, r.coordinates));
    save(dir / "errors.txt", [&](std::ostream& out) { io::write_vector(out, err.per_vertex); });
    report(dir, {{"command", "reconstruct"},
                 {"functions", k + lmh_k},
                 {"mean_error", err.mean},
                 {"warnings", r.warnings}});
  });

  // fmap
  std::string source_path, target_path, map_path, fmap_path, truth_path;
  MapBasis map_spec;
  auto* fmap = app.add_subcommand("fmap", "Functional map C from a point-to-point map (Y vertices -> X vertices)");
  add_common(fmap, common);
  fmap->add_option("--source", source_path, "Shape X")->required()->check(CLI::ExistingFile);
  fmap->add_option("--target", target_path, "Shape Y")->required()->check(CLI::ExistingFile);
  fmap->add_option("--map", map_path, "Point map: one X index per Y vertex")->required()->check(CLI::ExistingFile);
  add_map_basis(fmap, map_spec);
  fmap->callback([&] {
    const TriMesh x = read_mesh(source_path), y = read_mesh(target_path);
    const fs::path dir = prepare(common);
    const SolveOptions options = solve_options(common);
    const Discretization dx = discretize(x), dy = discretize(y);
    const Eigen::MatrixXd bx = map_basis(x, dx, map_spec, map_spec.region_x, options);
    const Eigen::MatrixXd by = map_basis(y, dy, map_spec, map_spec.region_y, options);
    const FunctionalMap c = build_fmap(bx, by, load_map(map_path), dy.mass);
    save(dir / "fmap.txt", [&](std::ostream& out) { io::write_matrix(out, c.c); });
    json summary{{"command", "fmap"}, {"rows", c.c.rows()}, {"cols", c.c.cols()}};
    if (map_spec.lmh_k > 0) summary["offblock_energy"] = offblock_energy(c, map_spec.kprime, map_spec.lmh_k);
    report(dir, summary);
  });

  // p2p
  auto* p2p = app.add_subcommand("p2p", "Recover a point map from a functional map");
  add_common(p2p, common);
  p2p->add_option("--source", source_path, "Shape X")->required()->check(CLI::ExistingFile);
  p2p->add_option("--target", target_path, "Shape Y")->required()->check(CLI::ExistingFile);
  p2p->add_option("--fmap", fmap_path, "Functional map matrix")->required()->check(CLI::ExistingFile);
  p2p->add_option("--truth", truth_path, "Ground-truth point map for scoring")->check(CLI::ExistingFile);
  add_map_basis(p2p, map_spec);
  p2p->callback([&] {
    const TriMesh x = read_mesh(source_path), y = read_mesh(target_path);
    const fs::path dir = prepare(common);
    const SolveOptions options = solve_options(common);
    const Discretization dx = discretize(x), dy = discretize(y);
    const Eigen::MatrixXd bx = map_basis(x, dx, map_spec, map_spec.region_x, options);
    const Eigen::MatrixXd by = map_basis(y, dy, map_spec, map_spec.region_y, options);
    std::istringstream in(io::read_file(fmap_path));
    const FunctionalMap c{io::read_matrix(in)};
    const PointMap recovered = recover_p2p(c, bx, by);
    save(dir / "p2p.txt", [&](std::ostream& out) { io::write_point_map(out, recovered); });
    json summary{{"command", "p2p"}, {"vertices", recovered.size()}};
    if (!truth_path.empty()) summary["mean_geodesic_error"] = geodesic_error_stats(recovered, load_map(truth_path), x).mean;
    report(dir, summary);
  });

  // error-curve
  auto* curve = app.add_subcommand("error-curve", "Cumulative geodesic error curve of a point map");
  add_common(curve, common);
  curve->add_option("--source", source_path, "Shape X, where the map's indices live")->required()->check(CLI::ExistingFile);
  curve->add_option("--map", map_path, "Recovered point map")->required()->check(CLI::ExistingFile);
  curve->add_option("--truth", truth_path, "Ground-truth point map")->required()->check(CLI::ExistingFile);
  curve->callback([&] {
    const TriMesh x = read_mesh(source_path);
    const fs::path dir = prepare(common);
    const GeodesicErrors e = geodesic_error_stats(load_map(map_path), load_map(truth_path), x);
    save(dir / "error_curve.csv", [&](std::ostream& out) { io::write_error_curve(out, e.thresholds, e.cumulative); });
    report(dir, {{"command", "error-curve"}, {"mean_geodesic_error", e.mean}});
  });

  // bench
  std::vector<int> sizes{20, 40, 69};
  auto* bench = app.add_subcommand("bench", "Relaxed vs hard timing on unit-square grids (left-half region)");
  add_common(bench, common);
  bench->add_option("--sizes", sizes, "Grid resolutions (n+1)^2 vertices")->delimiter(',')->check(CLI::PositiveNumber);
  bench->add_option("--k", k, "Localized functions")->check(CLI::PositiveNumber);
  bench->add_option("--kprime", kprime, "Global MH functions")->check(CLI::NonNegativeNumber);
  bench->callback([&] {
    const fs::path dir = prepare(common);
    std::ostringstream table;
    table << "vertices,k,path,seconds,status\n";
    for (int size : sizes) {
      const TriMesh mesh = grid_mesh(size, size);
      std::vector<bool> inside(static_cast<std::size_t>(mesh.num_vertices()));
      for (int i = 0; i < mesh.num_vertices(); ++i) inside[static_cast<std::size_t>(i)] = mesh.vertices()(i, 0) <= 0.5 + 1e-9;
      const Region left = Region::binary(inside);
      const Discretization disc = discretize(mesh);
      SolveOptions options = solve_options(common);
      const SpectralBasis global = compute_mh(disc, std::max(kprime, 1), options);
      LmhParams params;
      params.k = k;
      params.kprime = kprime;
      for (SolverPath path : {SolverPath::Relaxed, SolverPath::Hard}) {
        options.path = path;
        std::string status = "ok";
        const auto start = std::chrono::steady_clock::now();
        try {
          compute_lmh(disc, left, params, options, &global);
        } catch (const std::exception& e) {
          status = e.what();
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        // Quote the status: refusal messages contain commas.
        std::string quoted = status;
        for (std::size_t p = quoted.find('"'); p != std::string::npos; p = quoted.find('"', p + 2)) quoted.insert(p, "\"");
        table << mesh.num_vertices() << ',' << k << ',' << to_string(path) << ',' << seconds << ",\"" << quoted << "\"\n";
      }
    }
    io::write_file(dir / "bench.csv", table.str());
    std::cout << table.str();
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
