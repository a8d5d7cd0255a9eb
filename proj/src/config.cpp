#include "isct/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace isct {

double RunConfig::tube_radius() const {
  return p_tube_radius > 0 ? p_tube_radius : 0.05 * 2.0 * tau * std::sqrt(E);
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (!(E > 0)) fail("E must be > 0");
  if (!(tau > 0 && tau < 1)) fail("tau must lie in (0,1)");
  if (std::abs(nu.norm() - 1.0) > 1e-12) fail("nu must be a unit vector");
  if (!(mu >= 2)) fail("mu must be >= 2");
  if (!(mu0 >= 2 && mu0 <= mu)) fail("mu0 must lie in [2, mu]");
  if (!(alpha > 0 && alpha < 1)) fail("alpha must lie in (0,1)");
  if (!(sigma > 0 && sigma < 1)) fail("sigma must lie in (0,1)");
  if (!(beta > 0 && beta < std::min(alpha, std::min(sigma, 0.5))))
    fail("beta must lie in (0, min(alpha, sigma, 1/2))");
  if (n_sphere < 4 || n_lambda_circle < 4 || n_lambda_radial < 4 || n_p < 4)
    fail("grid resolutions must be >= 4");
  if (!(fp_tol > 0 && ls_tol > 0)) fail("tolerances must be > 0");
  if (fp_max_iter < 1 || ls_max_iter < 1) fail("iteration caps must be >= 1");
  if (tau0 > 0 && !(tau0 < tau)) fail("tau0 must be < tau");
}

std::string RunConfig::to_json() const {
  nlohmann::json j;
  j["E"] = E;
  j["tau"] = tau;
  j["nu"] = {nu(0), nu(1), nu(2)};
  j["mu"] = mu;
  j["mu0"] = mu0;
  j["alpha"] = alpha;
  j["sigma"] = sigma;
  j["beta"] = beta;
  j["n_sphere"] = n_sphere;
  j["n_lambda_circle"] = n_lambda_circle;
  j["n_lambda_radial"] = n_lambda_radial;
  j["n_p"] = n_p;
  j["fp_tol"] = fp_tol;
  j["fp_max_iter"] = fp_max_iter;
  j["ls_tol"] = ls_tol;
  j["ls_max_iter"] = ls_max_iter;
  j["p_tube_radius"] = tube_radius();
  j["tau0"] = tau0_or_default();
  j["cap_c7"] = cap_c7;
  j["n_x"] = n_x;
  return j.dump(2);
}

RunConfig RunConfig::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  RunConfig c;
  auto get = [&](const char* key, auto& slot) {
    if (j.contains(key)) slot = j.at(key).template get<std::decay_t<decltype(slot)>>();
  };
  get("E", c.E);
  get("tau", c.tau);
  if (j.contains("nu")) {
    auto v = j.at("nu");
    c.nu = Vec3(v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>());
  }
  get("mu", c.mu);
  get("mu0", c.mu0);
  get("alpha", c.alpha);
  get("sigma", c.sigma);
  get("beta", c.beta);
  get("n_sphere", c.n_sphere);
  get("n_lambda_circle", c.n_lambda_circle);
  get("n_lambda_radial", c.n_lambda_radial);
  get("n_p", c.n_p);
  get("fp_tol", c.fp_tol);
  get("fp_max_iter", c.fp_max_iter);
  get("ls_tol", c.ls_tol);
  get("ls_max_iter", c.ls_max_iter);
  get("p_tube_radius", c.p_tube_radius);
  get("tau0", c.tau0);
  get("cap_c7", c.cap_c7);
  get("n_x", c.n_x);
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config not found: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace isct
