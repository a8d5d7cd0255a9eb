#pragma once

#include <string>

#include "isct/types.hpp"

namespace isct {

// Run parameters shared by every stage. Serialized as a flat JSON object
// with exactly these field names; the optional knobs below keep their
// defaults when absent from the file.
struct RunConfig {
  double E = 4.0;            // energy, > 0
  double tau = 0.45;         // band-limit fraction, in (0,1)
  Vec3 nu = Vec3(0, 0, 1);   // unit axis of the excluded line
  double mu = 4.0;           // weight exponent, >= 2
  double mu0 = 2.0;          // weight exponent, in [2, mu]
  double alpha = 0.5;        // Hoelder exponent, in (0,1)
  double sigma = 0.5;        // decay exponent, in (0,1)
  double beta = 0.2;         // in (0, min(alpha, sigma, 1/2))
  int n_sphere = 10;         // polar rings; sphere has n_sphere^2 nodes
  int n_lambda_circle = 48;  // nodes on |lambda| = 1
  int n_lambda_radial = 8;   // radial rings per disk component
  int n_p = 8;               // lattice points per axis across the p-ball
  double fp_tol = 1e-11;     // fixed-point stopping tolerance
  int fp_max_iter = 40;
  double ls_tol = 1e-11;  // forward-solver stopping tolerance
  int ls_max_iter = 60;
  double p_tube_radius = -1;  // <0: use default 0.05 * 2 tau sqrt(E)

  // Optional knobs (not part of the required field set).
  double tau0 = -1;     // restricted-data taper start; <0: tau/2
  double cap_c7 = 0.0;  // coefficient of the quadratic cap term
  int n_x = 7;          // reconstruction lattice points per axis

  double tube_radius() const;
  double tau0_or_default() const { return tau0 > 0 ? tau0 : 0.5 * tau; }
  // Validates every invariant; throws std::invalid_argument on violation.
  void validate() const;

  std::string to_json() const;
  static RunConfig from_json(const std::string& text);
  static RunConfig load(const std::string& path);
};

}  // namespace isct
