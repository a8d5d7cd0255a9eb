#include "isct/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include <json.hpp>

#include "isct/faddeev.hpp"
#include "isct/forward.hpp"

namespace isct {
namespace pipeline {

Mode parse_mode(const std::string& name) {
  if (name == "full") return Mode::full;
  if (name == "born") return Mode::born;
  if (name == "restricted") return Mode::restricted;
  throw std::invalid_argument("unknown mode: " + name);
}

namespace {

[[noreturn]] void stage_fail(const std::string& stage, const std::exception& e) {
  throw std::runtime_error("stage " + stage + ": " + e.what());
}

// Born-mode regrid: inverse-distance average of the four node pairs whose
// difference k - l is closest to p.
VectorXcd regrid_born(const ScatteringData& data, const PGrid& pg) {
  const int n = data.grid.size();
  const int np = pg.size();
  VectorXcd out(np);
  const double eps = 1e-9 * data.grid.radius;
  for (int jp = 0; jp < np; ++jp) {
    const Vec3 p = pg.nodes[jp];
    std::array<std::pair<double, cplx>, 4> best;
    best.fill({std::numeric_limits<double>::max(), cplx(0, 0)});
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double d = (data.grid.nodes[i] - data.grid.nodes[j] - p).norm();
        if (d < best[3].first) {
          best[3] = {d, data.f(i, j)};
          std::sort(best.begin(), best.end(),
                    [](const auto& a, const auto& b) { return a.first < b.first; });
        }
      }
    cplx acc = 0;
    double wsum = 0;
    for (const auto& [d, v] : best) {
      const double w = 1.0 / (d + eps);
      acc += w * v;
      wsum += w;
    }
    out(jp) = acc / wsum;
  }
  return out;
}

}  // namespace

ReconstructResult reconstruct(const ScatteringData& data, const RunConfig& cfg, Mode mode) {
  ReconstructResult res;
  auto lg = std::make_shared<LambdaGrid>(cfg);
  auto pg = std::make_shared<PGrid>(cfg);
  res.rec.E = cfg.E;
  res.rec.tau = cfg.tau;
  res.rec.mu0 = cfg.mu0;
  res.rec.p_nodes = pg->nodes;

  if (mode == Mode::born) {
    res.report.mode = "born";
    VectorXcd vhat = regrid_born(data, *pg);
    res.rec.vplus = vhat;
    res.rec.vminus = vhat;
    res.rec.gap = 0.0;
    extract::Reconstruction r = extract::reconstruct_v(vhat, *pg, cfg);
    res.rec.x_nodes = std::move(r.x_nodes);
    res.rec.v_appr = std::move(r.v_appr);
    res.rec.norm_vplus = res.rec.norm_vminus = weighted_sup_norm_p(vhat, *pg, cfg.mu0);
    res.report.norm_vplus = res.report.norm_vminus = res.rec.norm_vplus;
    return res;
  }

  ScatteringData working = data;
  if (mode == Mode::restricted) {
    res.report.mode = "restricted";
    try {
      working = faddeev::taper_f(data, cfg.tau0_or_default(), cfg.tau);
    } catch (const std::exception& e) {
      stage_fail("taper", e);
    }
  } else {
    res.report.mode = "full";
  }

  verify::DiagnosticsReport diag;
  try {
    diag = verify::diagnostics_report(working, nullptr, cfg);
    if (!diag.contraction_ok)
      throw std::runtime_error("contraction diagnostics failed (delta1 >= 1)");
  } catch (const std::exception& e) {
    stage_fail("diagnostics", e);
  }
  res.report.eta_hat = diag.eta_hat;
  res.report.delta1_hat = diag.delta1_hat;
  res.report.delta2_hat = diag.delta2_hat;

  BoundaryData bd;
  try {
    bd = faddeev::boundary_values(working, lg, pg, cfg);
  } catch (const std::exception& e) {
    stage_fail("faddeev", e);
  }

  dbar::DbarState state;
  dbar::BracketEngine engine(cfg, lg, pg);
  dbar::MOperator mop(lg);
  try {
    ComplexField2D h0 = dbar::build_cauchy_data(bd);
    h0 = dbar::cap_h0(h0, diag.N_hat, diag.eta_hat, std::min(diag.delta1_hat, 0.99), cfg.beta,
                      cfg);
    state = dbar::solve_fixed_point(h0, engine, mop, cfg, diag.N_hat, diag.eta_hat);
  } catch (const std::exception& e) {
    stage_fail("dbar", e);
  }
  res.report.contraction = state.diagnostics.contraction_estimate;
  res.report.fp_iterations = state.diagnostics.iterations;
  res.report.r1 = state.diagnostics.r1;
  res.report.r2 = state.diagnostics.r2;
  res.report.skipped_nodes = state.diagnostics.skipped_nodes;

  try {
    extract::VhatPair v = extract::vhat_pm(state, bd, engine, mop);
    res.rec.vplus = v.plus;
    res.rec.vminus = v.minus;
    res.rec.gap = extract::consistency_gap(v.plus, v.minus, *pg, cfg.mu0);
    res.rec.norm_vplus = weighted_sup_norm_p(v.plus, *pg, cfg.mu0);
    res.rec.norm_vminus = weighted_sup_norm_p(v.minus, *pg, cfg.mu0);
    VectorXcd avg = 0.5 * (v.plus + v.minus);
    extract::Reconstruction r = extract::reconstruct_v(avg, *pg, cfg);
    res.rec.x_nodes = std::move(r.x_nodes);
    res.rec.v_appr = std::move(r.v_appr);
  } catch (const std::exception& e) {
    stage_fail("extract", e);
  }
  res.report.gap = res.rec.gap;
  res.report.norm_vplus = res.rec.norm_vplus;
  res.report.norm_vminus = res.rec.norm_vminus;
  return res;
}

int cmd_simulate(const std::string& config_path, const std::string& potential_path,
                 const std::string& out_path, std::ostream& log) {
  RunConfig cfg;
  AnalyticPotential pot;
  try {
    cfg = RunConfig::load(config_path);
    pot = AnalyticPotential::load(potential_path);
  } catch (const std::exception& e) {
    log << e.what() << "\n";
    return 2;
  }
  try {
    SphereGrid grid(cfg.E, cfg.n_sphere);
    forward::LsReport rep;
    ScatteringData data = forward::solve_f_LS(pot, grid, cfg, &rep);
    io::write_scattering(out_path, data);
    nlohmann::json j;
    j["ls_iterations"] = rep.iterations;
    j["ls_residual"] = rep.last_residual;
    j["ls_contraction"] = rep.contraction_estimate;
    j["reciprocity_defect"] = rep.reciprocity_defect;
    log << j.dump(2) << "\n";
  } catch (const io::IoError& e) {
    log << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    log << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_reconstruct(const std::string& config_path, const std::string& data_path,
                    const std::string& out_dir, const std::string& mode_name, std::ostream& log) {
  RunConfig cfg;
  Mode mode;
  ScatteringData data;
  try {
    cfg = RunConfig::load(config_path);
    mode = parse_mode(mode_name);
    data = io::read_scattering(data_path, cfg);
    std::filesystem::create_directories(out_dir);
  } catch (const std::exception& e) {
    log << e.what() << "\n";
    return 2;
  }
  ReconstructResult res;
  try {
    res = reconstruct(data, cfg, mode);
  } catch (const std::exception& e) {
    log << e.what() << "\n";
    return 1;
  }
  try {
    const std::string rec_path = out_dir + "/reconstruction.rec";
    const std::string report_path = out_dir + "/report.json";
    const std::string manifest_path = out_dir + "/manifest.json";
    io::write_reconstruction(rec_path, res.rec);
    nlohmann::json j;
    j["mode"] = res.report.mode;
    j["eta_hat"] = res.report.eta_hat;
    j["delta1_hat"] = res.report.delta1_hat;
    j["delta2_hat"] = res.report.delta2_hat;
    j["contraction"] = res.report.contraction;
    j["fp_iterations"] = res.report.fp_iterations;
    j["gap"] = res.report.gap;
    j["r1"] = res.report.r1;
    j["r2"] = res.report.r2;
    j["norm_vplus"] = res.report.norm_vplus;
    j["norm_vminus"] = res.report.norm_vminus;
    j["skipped_nodes"] = res.report.skipped_nodes;
    {
      std::ofstream out(report_path);
      out << j.dump(2) << "\n";
    }
    // Manifests key artifacts by basename so identical runs hash identically
    // regardless of the output directory.
    auto base = [](const std::string& path) {
      return std::filesystem::path(path).filename().string();
    };
    io::write_manifest(manifest_path, cfg, {{base(data_path), io::file_hash(data_path)}},
                       {{base(rec_path), io::file_hash(rec_path)},
                        {base(report_path), io::file_hash(report_path)}});
    log << j.dump(2) << "\n";
  } catch (const std::exception& e) {
    log << e.what() << "\n";
    return 2;
  }
  return 0;
}

namespace {

struct Check {
  std::string name;
  bool pass;
  double margin;
};

void run_coords_suite(const RunConfig& cfg, std::vector<Check>& checks) {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> rad(0.1, 10.0);
  const double E = cfg.E;
  double worst_rt = 0, worst_im = 0, worst_forms = 0;
  for (int s = 0; s < 1000; ++s) {
    Vec3 p;
    do {
      p = Vec3(unit(rng), unit(rng), unit(rng));
    } while (p.norm() < 1e-3 || p.cross(cfg.nu).norm() < 1e-3);
    p *= (1.9 * std::sqrt(E) / p.norm()) * std::abs(unit(rng));
    if (p.cross(cfg.nu).norm() < 1e-6) continue;
    const cplx lambda = std::polar(rad(rng), pi * unit(rng));
    const coords::Frame fr = coords::frame_of(p, cfg.nu);
    const coords::ComplexMomentum km = coords::k_from_lambda(lambda, p, E, fr);
    const cplx back = coords::lambda_from_k(km, p, fr);
    worst_rt = std::max(worst_rt, std::abs(back - lambda) / std::abs(lambda));
    worst_forms = std::max(
        worst_forms,
        std::abs(km.re().norm() - coords::re_k_norm(lambda, p.norm(), E)) / std::sqrt(E));
    worst_forms = std::max(
        worst_forms,
        std::abs(km.im().norm() - coords::im_k_norm(lambda, p.norm(), E)) / std::sqrt(E));
    const cplx on_circle = std::polar(1.0, pi * unit(rng));
    const coords::ComplexMomentum kr = coords::k_from_lambda(on_circle, p, E, fr);
    worst_im = std::max(worst_im, kr.im().norm() / std::sqrt(E));
  }
  checks.push_back({"coords.round_trip", worst_rt < 1e-9, 1e-9 - worst_rt});
  checks.push_back({"coords.real_locus", worst_im < 1e-10, 1e-10 - worst_im});
  checks.push_back({"coords.norm_forms", worst_forms < 1e-10, 1e-10 - worst_forms});
}

void run_cauchy_suite(std::vector<Check>& checks) {
  // Monomial data reproduce residue values through the contour transforms.
  auto lg = std::make_shared<LambdaGrid>(512, 4, 0.05, 20.0, 0.02);
  auto pg = std::make_shared<PGrid>(1.0, 0.02, Vec3(0, 0, 1), 4);
  BoundaryData bd(lg, pg);
  const int nc = 512;
  double worst = 0;
  for (int j = 0; j < nc; ++j) {
    const cplx z = lg->circle_nodes[j];
    bd.plus(j, 0) = z * z;
    bd.minus(j, 0) = 1.0 / z;
  }
  const cplx li(0.3, 0.4), lo(2.0, -1.0);
  worst = std::max(worst, std::abs(dbar::cauchy_boundary_h0(bd, li, 0) - li * li));
  worst = std::max(worst, std::abs(dbar::cauchy_boundary_h0(bd, lo, 0) - 1.0 / lo));
  // One-sided limits at a node.
  const int jn = 37;
  const cplx zn = lg->circle_nodes[jn];
  worst = std::max(worst, std::abs(dbar::boundary_limit_h0(bd, true, jn, 0, 4.0) - zn * zn));
  worst = std::max(worst, std::abs(dbar::boundary_limit_h0(bd, false, jn, 0, 4.0) - 1.0 / zn));
  checks.push_back({"cauchy.residue_values", worst < 1e-8, 1e-8 - worst});

  verify::CauchyGreenReport cg = verify::cauchy_green_check();
  checks.push_back({"cauchy.green_identity", cg.pass,
                    1e-8 - std::max(cg.defect_holomorphic, cg.defect_conj)});
}

void run_bounds_suite(std::vector<Check>& checks) {
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> ur(0.0, 1.0);
  double min_margin12 = std::numeric_limits<double>::max();
  bool ok12 = true;
  for (int s = 0; s < 200; ++s) {
    const double r = 10.0 * ur(rng);
    const double psi = pi * (2.0 * ur(rng) - 1.0);
    verify::KernelMomentReport rep = verify::lemma12_check(r, psi, 2.0, 2.0, 1e-8);
    ok12 = ok12 && rep.pass;
    min_margin12 = std::min(min_margin12, std::min(rep.A_margin, rep.B_margin));
  }
  checks.push_back({"bounds.kernel_moments", ok12, min_margin12});

  double min_margin13 = std::numeric_limits<double>::max();
  bool ok13 = true;
  for (int s = 0; s < 200; ++s) {
    const double E = 1.0 + 15.0 * ur(rng);
    const double tau = 0.2 + 0.6 * ur(rng);
    const double rho = 2.0 * tau * std::sqrt(E) * ur(rng);
    const double mag = std::exp(std::log(0.1) + (std::log(10.0) - std::log(0.1)) * ur(rng));
    const cplx lambda = std::polar(mag == 1.0 ? 1.01 : mag, 2.0 * pi * ur(rng));
    const double a = 2.0 + 2.0 * ur(rng);
    verify::ChartBoundReport rep = verify::lemma13_check(lambda, rho, E, tau, a, a, 1e-8);
    ok13 = ok13 && rep.pass;
    min_margin13 = std::min(min_margin13, rep.min_margin);
  }
  checks.push_back({"bounds.chart_bounds", ok13, min_margin13});
}

void run_dbar_suite(const RunConfig& cfg_in, std::vector<Check>& checks) {
  RunConfig cfg = cfg_in;
  cfg.tau = 0.9;
  cfg.ls_tol = 1e-10;
  const AnalyticPotential pot = AnalyticPotential::gaussian(0.6, 1.5);
  forward::HOracle oracle(pot, cfg, {24, -1});
  dbar::OracleEvaluator ev(oracle);
  const std::vector<std::pair<cplx, Vec3>> samples = {
      {cplx(0.45, 0.45), Vec3(0.6, 0.3, 0.4)},
      {cplx(1.35, -0.55), Vec3(-0.4, 0.7, 0.2)},
      {cplx(-0.38, 0.52), Vec3(0.3, -0.5, 0.6)},
      {cplx(0.2, -1.55), Vec3(0.5, 0.4, -0.3)},
  };
  double worst_ratio = 0;
  for (const auto& [lambda, p] : samples) {
    dbar::ResidualSample rs = dbar::dbar_residual(ev, lambda, p, cfg, 0.03, 16);
    const double scale = std::max({std::abs(rs.lhs), std::abs(rs.rhs), 1e-12});
    worst_ratio = std::max(worst_ratio, std::abs(rs.residual) / scale);
  }
  checks.push_back({"dbar.residual", worst_ratio < 0.15, 0.15 - worst_ratio});
}

}  // namespace

int cmd_verify(const std::string& config_path, const std::string& suite,
               const std::string& out_path, std::ostream& log) {
  RunConfig cfg;
  try {
    cfg = RunConfig::load(config_path);
  } catch (const std::exception& e) {
    log << e.what() << "\n";
    return 2;
  }
  if (suite != "coords" && suite != "cauchy" && suite != "bounds" && suite != "dbar" &&
      suite != "all") {
    log << "unknown suite: " << suite << "\n";
    return 2;
  }
  std::vector<Check> checks;
  try {
    if (suite == "coords" || suite == "all") run_coords_suite(cfg, checks);
    if (suite == "cauchy" || suite == "all") run_cauchy_suite(checks);
    if (suite == "bounds" || suite == "all") run_bounds_suite(checks);
    if (suite == "dbar" || suite == "all") run_dbar_suite(cfg, checks);
  } catch (const std::exception& e) {
    log << "verify aborted: " << e.what() << "\n";
    return 1;
  }
  bool all_pass = true;
  nlohmann::json arr = nlohmann::json::array();
  for (const Check& c : checks) {
    all_pass = all_pass && c.pass;
    arr.push_back({{"name", c.name}, {"pass", c.pass}, {"margin", c.margin}});
    log << (c.pass ? "PASS " : "FAIL ") << c.name << " (margin " << c.margin << ")\n";
  }
  nlohmann::json j;
  j["suite"] = suite;
  j["checks"] = arr;
  j["pass"] = all_pass;
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    out << j.dump(2) << "\n";
  }
  return all_pass ? 0 : 1;
}

}  // namespace pipeline
}  // namespace isct
