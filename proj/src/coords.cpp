#include "isct/coords.hpp"

#include <cmath>
#include <stdexcept>

namespace isct {
namespace coords {

Frame frame_of(const Vec3& p, const Vec3& nu) {
  const Vec3 c = nu.cross(p);
  const double cn = c.norm();
  if (cn <= 1e-12 * std::max(1.0, p.norm())) throw std::runtime_error("degenerate frame");
  Frame fr;
  fr.theta = c / cn;
  fr.omega = p.cross(fr.theta) / p.norm();
  fr.p = p;
  return fr;
}

ComplexMomentum k_from_lambda(cplx lambda, const Vec3& p, double E, const Frame& frame) {
  const double p2 = p.squaredNorm();
  if (p2 >= 4.0 * E) throw std::runtime_error("p outside ball");
  if (lambda == cplx(0, 0)) throw std::runtime_error("lambda = 0 off chart");
  const double s = std::sqrt(E - 0.25 * p2);
  const cplx kappa1 = (lambda + 1.0 / lambda) * (0.5 * s);
  const cplx kappa2 = (1.0 / lambda - lambda) * (iu * 0.5 * s);
  ComplexMomentum km;
  km.E = E;
  km.k = kappa1 * frame.theta.cast<cplx>() + kappa2 * frame.omega.cast<cplx>() +
         (0.5 * p).cast<cplx>();
  return km;
}

cplx lambda_from_k(const ComplexMomentum& km, const Vec3& p, const Frame& frame) {
  const double p2 = p.squaredNorm();
  if (p2 >= 4.0 * km.E) throw std::runtime_error("p outside ball");
  const double s = std::sqrt(km.E - 0.25 * p2);
  return (cdot(km.k, frame.theta) + iu * cdot(km.k, frame.omega)) / s;
}

double re_k_norm(cplx lambda, double p_norm, double E) {
  const double a = std::abs(lambda);
  const double s2 = E - 0.25 * p_norm * p_norm;
  const double t = a + 1.0 / a;
  return std::sqrt(0.25 * s2 * t * t + 0.25 * p_norm * p_norm);
}

double im_k_norm(cplx lambda, double p_norm, double E) {
  const double a = std::abs(lambda);
  return 0.5 * std::sqrt(E - 0.25 * p_norm * p_norm) * std::abs(a - 1.0 / a);
}

Vec3 k_perp(const ComplexMomentum& km) {
  const Vec3 im = km.im();
  const double n = im.norm();
  if (n == 0.0) throw std::runtime_error("k real, k_perp undefined");
  return im.cross(km.re()) / n;
}

Vec3 xi_circle(cplx lambda, const Vec3& p, double E, double phi, const Frame& frame) {
  const ComplexMomentum km = k_from_lambda(lambda, p, E, frame);
  if (km.im().norm() <= 1e-12 * std::sqrt(E)) throw std::runtime_error("k real, k_perp undefined");
  return km.re() * (std::cos(phi) - 1.0) + k_perp(km) * std::sin(phi);
}

std::pair<cplx, cplx> z1_z2(cplx lambda, const Vec3& p, double E, double phi, const Vec3& nu) {
  const Frame frame = frame_of(p, nu);
  const ComplexMomentum km = k_from_lambda(lambda, p, E, frame);
  if (km.im().norm() <= 1e-12 * std::sqrt(E)) throw std::runtime_error("k real, k_perp undefined");
  const Vec3 xi = km.re() * (std::cos(phi) - 1.0) + k_perp(km) * std::sin(phi);

  const Vec3 q1 = -xi;
  const Vec3 q2 = p + xi;
  if (q1.squaredNorm() >= 4.0 * E || q2.squaredNorm() >= 4.0 * E)
    throw std::runtime_error("arg off chart");
  Frame f1, f2;
  try {
    f1 = frame_of(q1, nu);
    f2 = frame_of(q2, nu);
  } catch (const std::runtime_error&) {
    throw std::runtime_error("arg off chart");
  }
  const cplx z1 = lambda_from_k(km, q1, f1);
  ComplexMomentum shifted;
  shifted.E = E;
  shifted.k = km.k + xi.cast<cplx>();
  const cplx z2 = lambda_from_k(shifted, q2, f2);
  return {z1, z2};
}

std::pair<Vec3, Vec3> gamma_pm(cplx lambda, const Vec3& p, double E, const Frame& frame) {
  const double pn = p.norm();
  if (pn == 0.0) throw std::runtime_error("gamma undefined at p = 0");
  if (std::abs(std::abs(lambda) - 1.0) > 1e-10)
    throw std::runtime_error("gamma requires |lambda| = 1");
  const ComplexMomentum km = k_from_lambda(lambda, p, E, frame);
  const Vec3 k = km.re();  // real on the circle up to rounding
  const Vec3 axis = p.cross(k - 0.5 * p);
  const Vec3 gp = axis / (pn * (k - 0.5 * p).norm());
  return {gp, -gp};
}

double psi_of(const ComplexMomentum& km, const Vec3& p) {
  const Vec3 re = km.re();
  const double r2 = re.squaredNorm();
  const double c = 1.0 - 0.5 * p.squaredNorm() / r2;
  const double s = -p.dot(k_perp(km)) / r2;
  return std::atan2(s, c);
}

}  // namespace coords
}  // namespace isct
