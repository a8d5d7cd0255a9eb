#include "isct/potentials.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "isct/quadrature.hpp"

namespace isct {

AnalyticPotential::AnalyticPotential(std::vector<Term> t) : terms(std::move(t)) {
  if (terms.empty()) throw std::invalid_argument("potential: needs at least one term");
  for (const auto& term : terms)
    if (!(term.width > 0)) throw std::invalid_argument("potential: width must be > 0");
}

AnalyticPotential AnalyticPotential::gaussian(double amplitude, double width, const Vec3& center) {
  return AnalyticPotential({Term{amplitude, width, center}});
}

AnalyticPotential AnalyticPotential::scaled(double s) const {
  AnalyticPotential out = *this;
  for (auto& t : out.terms) t.amplitude *= s;
  return out;
}

double AnalyticPotential::eval(const Vec3& x) const {
  double acc = 0.0;
  for (const auto& t : terms)
    acc += t.amplitude * std::exp(-(x - t.center).squaredNorm() / (t.width * t.width));
  return acc;
}

double AnalyticPotential::min_width() const {
  double w = terms.front().width;
  for (const auto& t : terms) w = std::min(w, t.width);
  return w;
}

std::string AnalyticPotential::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : terms)
    arr.push_back({{"amplitude", t.amplitude},
                   {"width", t.width},
                   {"center", {t.center(0), t.center(1), t.center(2)}}});
  return arr.dump(2);
}

AnalyticPotential AnalyticPotential::from_json(const std::string& text) {
  nlohmann::json arr = nlohmann::json::parse(text);
  std::vector<Term> terms;
  for (const auto& e : arr) {
    Term t;
    t.amplitude = e.at("amplitude").get<double>();
    t.width = e.at("width").get<double>();
    auto c = e.at("center");
    t.center = Vec3(c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>());
    terms.push_back(t);
  }
  return AnalyticPotential(std::move(terms));
}

AnalyticPotential AnalyticPotential::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("potential not found: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

cplx vhat_eval(const AnalyticPotential& pot, const Vec3& p) {
  cplx acc = 0.0;
  const double p2 = p.squaredNorm();
  for (const auto& t : pot.terms) {
    const double amp = t.amplitude * std::pow(t.width / (2.0 * std::sqrt(pi)), 3);
    acc += amp * std::exp(-0.25 * t.width * t.width * p2) *
           std::exp(iu * cplx(p.dot(t.center), 0));
  }
  return acc;
}

CVec3 vhat_grad(const AnalyticPotential& pot, const Vec3& p) {
  CVec3 acc = CVec3::Zero();
  const double p2 = p.squaredNorm();
  for (const auto& t : pot.terms) {
    const double amp = t.amplitude * std::pow(t.width / (2.0 * std::sqrt(pi)), 3);
    const cplx base = amp * std::exp(-0.25 * t.width * t.width * p2) *
                      std::exp(iu * cplx(p.dot(t.center), 0));
    acc += base * (iu * t.center.cast<cplx>() -
                   cplx(0.5 * t.width * t.width, 0) * p.cast<cplx>());
  }
  return acc;
}

ScatteringData born_f(const AnalyticPotential& pot, const SphereGrid& grid) {
  ScatteringData data(grid);
  const int n = grid.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      data.f(i, j) = vhat_eval(pot, grid.nodes[i] - grid.nodes[j]);
  return data;
}

double vhat_tail_mass(const AnalyticPotential& pot, double radius) {
  // 4 pi int_R^inf r^2 |vhat(r)| dr per term; |.| of the sum bounded by the
  // sum of term tails.
  double total = 0.0;
  for (const auto& t : pot.terms) {
    const double amp = std::abs(t.amplitude) * std::pow(t.width / (2.0 * std::sqrt(pi)), 3);
    const double b = 0.25 * t.width * t.width;
    auto f = [&](double r) { return r * r * std::exp(-b * r * r); };
    const double upper = radius + 12.0 / t.width;
    total += 4.0 * pi * amp * adaptive_integrate(f, radius, upper, 1e-14);
  }
  return total;
}

IftResult band_limited_ift(const VectorXcd& vhat_samples, const PGrid& grid,
                           const std::vector<Vec3>& x_nodes) {
  if (grid.size() == 0) throw std::runtime_error("ift: empty grid");
  if (vhat_samples.size() != grid.size()) throw std::invalid_argument("ift: size mismatch");
  IftResult out;
  out.values.reserve(x_nodes.size());
  const double w = grid.h * grid.h * grid.h;
  // Quadrature over every lattice site inside the ball; removed sites take
  // their nearest kept node's value.
  std::vector<Vec3> sites;
  std::vector<int> site_node;
  for (int ix = 0; ix < grid.n_axis; ++ix)
    for (int iy = 0; iy < grid.n_axis; ++iy)
      for (int iz = 0; iz < grid.n_axis; ++iz) {
        const Vec3 p(grid.origin + grid.h * ix, grid.origin + grid.h * iy,
                     grid.origin + grid.h * iz);
        if (p.norm() >= grid.ball_radius) continue;
        sites.push_back(p);
        site_node.push_back(grid.lattice_to_node[grid.lattice_index(ix, iy, iz)]);
      }
  for (const auto& x : x_nodes) {
    cplx acc = 0.0;
    for (size_t s = 0; s < sites.size(); ++s)
      acc += w * std::exp(-iu * cplx(sites[s].dot(x), 0)) * vhat_samples(site_node[s]);
    out.values.push_back(acc.real());
    out.max_imag = std::max(out.max_imag, std::abs(acc.imag()));
  }
  return out;
}

}  // namespace isct
