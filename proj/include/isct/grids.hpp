#pragma once

#include <vector>

#include "isct/config.hpp"
#include "isct/types.hpp"

namespace isct {

// Quadrature grid on the sphere |m| = sqrt(E): Gauss-Legendre in the polar
// cosine times a uniform azimuth, n polar rings x n azimuths. Weights sum
// to the sphere area 4 pi E.
struct SphereGrid {
  double E = 0;
  double radius = 0;
  int n_polar = 0;
  int n_azimuth = 0;
  std::vector<Vec3> nodes;
  std::vector<double> weights;

  SphereGrid() = default;
  SphereGrid(double E, int n_polar);

  int size() const { return static_cast<int>(nodes.size()); }
  int index(int ipolar, int iaz) const { return ipolar * n_azimuth + iaz; }
  // Index of the node closest to -nodes[i]; exact for even azimuth counts.
  int antipode(int i) const;

  // Bilinear stencil in (polar cosine, azimuth) at an arbitrary direction.
  struct Taps {
    int idx[4];
    double w[4];
  };
  Taps taps(const Vec3& direction) const;
  // Bilinear interpolation of a nodal function; |l| is not checked.
  cplx interpolate(const VectorXcd& values, const Vec3& l) const;
  // Row-space interpolation of a matrix indexed (k-node, l-node): returns
  // the virtual row at direction k.
  VectorXcd interpolate_rows(const MatrixXcd& table, const Vec3& k) const;

  std::vector<double> ring_cos;  // polar cosines, ascending
};

// Lattice points of an offset Cartesian grid inside the ball |p| < 2 tau
// sqrt(E), with a tube around the line through nu removed. Keeps the full
// lattice index so fields can be trilinearly interpolated; removed lattice
// sites are redirected to their nearest kept node.
struct PGrid {
  double ball_radius = 0;
  double tube_radius = 0;
  Vec3 nu = Vec3(0, 0, 1);
  double h = 0;        // lattice spacing
  double origin = 0;   // first lattice coordinate per axis
  int n_axis = 0;      // lattice points per axis
  std::vector<Vec3> nodes;
  std::vector<double> weights;        // cell volume h^3 per kept node
  std::vector<int> lattice_to_node;   // n_axis^3, node id or redirect target
  std::vector<bool> lattice_is_node;  // true where the site itself is kept

  PGrid() = default;
  PGrid(const RunConfig& cfg);
  PGrid(double ball_radius, double tube_radius, const Vec3& nu, int n_axis);

  int size() const { return static_cast<int>(nodes.size()); }
  int lattice_index(int ix, int iy, int iz) const {
    return (ix * n_axis + iy) * n_axis + iz;
  }
  // Trilinear interpolation of a nodal function; returns 0 outside the ball
  // (consistent with the hard ball cutoff), nearest-node values across the
  // removed tube.
  cplx interpolate(const VectorXcd& values, const Vec3& p) const;
};

// Polar tensor grid on the unit circle, the punctured disk and the exterior.
// Area weights are exact annular-sector areas, so integrating 1 over the
// disk component reproduces pi ((1-eps_T)^2 - lambda_min^2) to rounding.
struct LambdaGrid {
  double lambda_min = 0.05;
  double lambda_max = 20.0;
  double eps_T = 0.02;
  int n_angle = 0;
  int n_radial = 0;  // rings per component
  std::vector<cplx> circle_nodes;
  std::vector<cplx> area_nodes;        // inner rings then outer rings
  std::vector<double> area_weights;    // exact cell areas
  std::vector<cplx> cell_moment2;      // avg((zeta - node)^2) per cell
  int n_inner = 0;                     // area_nodes[0..n_inner) lie in D+

  LambdaGrid() = default;
  LambdaGrid(const RunConfig& cfg);
  LambdaGrid(int n_circle, int n_radial, double lambda_min, double lambda_max, double eps_T);

  int n_area() const { return static_cast<int>(area_nodes.size()); }
  bool is_inner(int i) const { return i < n_inner; }
  // Equal-area disk radius of the cell around area node i.
  double cell_radius(int i) const { return std::sqrt(area_weights[i] / pi); }
  // Bilinear interpolation in (log radius, angle) of a per-area-node
  // function; radius clamps to the rings of the component containing z.
  cplx interpolate(const VectorXcd& values, cplx z) const;

  std::vector<double> inner_radii;  // ring radii, ascending
  std::vector<double> outer_radii;
};

// Radial x spherical product grid for integrals over R^3 with a principal
// value across the shell |m| = sqrt(E). Radial nodes are mirrored in pairs
// about sqrt(E) inside the window so the PV cancellation is explicit.
struct RadialGrid3D {
  double E = 0;
  double r_max = 0;
  double pv_halfwidth = 0;
  std::vector<double> radii;          // excludes sqrt(E) itself
  std::vector<double> radial_weights; // plain GL weights, positive

  RadialGrid3D() = default;
  RadialGrid3D(double E, double r_max, int n_panel, int pts_per_panel);

  int size() const { return static_cast<int>(radii.size()); }
};

}  // namespace isct
