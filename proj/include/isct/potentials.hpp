#pragma once

#include <string>
#include <vector>

#include "isct/fields.hpp"
#include "isct/types.hpp"

namespace isct {

// Sum of Gaussian bumps v(x) = sum_i a_i exp(-|x - c_i|^2 / w_i^2). Each term
// has a closed-form Fourier transform in the (2 pi)^-3 e^{ipx} convention.
struct AnalyticPotential {
  struct Term {
    double amplitude = 1.0;
    double width = 1.0;
    Vec3 center = Vec3::Zero();
  };
  std::vector<Term> terms;

  AnalyticPotential() = default;
  explicit AnalyticPotential(std::vector<Term> t);
  static AnalyticPotential gaussian(double amplitude, double width, const Vec3& center = Vec3::Zero());
  AnalyticPotential scaled(double s) const;

  double eval(const Vec3& x) const;
  double min_width() const;

  std::string to_json() const;
  static AnalyticPotential from_json(const std::string& text);
  static AnalyticPotential load(const std::string& path);
};

// Fourier transform vhat(p) = (2 pi)^-3 integral e^{ipx} v(x) dx, closed form.
cplx vhat_eval(const AnalyticPotential& pot, const Vec3& p);
// Gradient of the transform in p, closed form.
CVec3 vhat_grad(const AnalyticPotential& pot, const Vec3& p);

// Linearized (Born) data f(k, l) = vhat(k - l) on all node pairs.
ScatteringData born_f(const AnalyticPotential& pot, const SphereGrid& grid);

// Tail mass integral of |vhat| outside the ball of the given radius.
double vhat_tail_mass(const AnalyticPotential& pot, double radius);

struct IftResult {
  std::vector<double> values;   // Re v_appr per x node
  double max_imag = 0;          // diagnostic: largest |Im| encountered
};

// Band-limited inverse transform v_appr(x) = sum_p w_p e^{-ip.x} vhat(p)
// over the ball quadrature; removed tube sites contribute their
// nearest-node value.
IftResult band_limited_ift(const VectorXcd& vhat_samples, const PGrid& grid,
                           const std::vector<Vec3>& x_nodes);

}  // namespace isct
