#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace isct {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx iu{0.0, 1.0};

// Bilinear (non-hermitian) dot product a.b = sum a_i b_i.
inline cplx cdot(const CVec3& a, const CVec3& b) { return (a.array() * b.array()).sum(); }
inline cplx cdot(const CVec3& a, const Vec3& b) { return a(0) * b(0) + a(1) * b(1) + a(2) * b(2); }

}  // namespace isct
