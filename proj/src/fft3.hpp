#pragma once

#include <unsupported/Eigen/FFT>
#include <vector>

#include "isct/types.hpp"

namespace isct {

// In-place 3D FFT over a contiguous n^3 complex array (index (ix*n+iy)*n+iz),
// built from 1D transforms along each axis.
class Fft3 {
 public:
  explicit Fft3(int n) : n_(n), buf_in_(n), buf_out_(n) {}

  void forward(std::vector<cplx>& a) { transform(a, false); }
  void inverse(std::vector<cplx>& a) {
    transform(a, true);
    const double scale = 1.0 / (static_cast<double>(n_) * n_ * n_);
    for (auto& v : a) v *= scale;
  }

 private:
  void transform(std::vector<cplx>& a, bool inv) {
    // z-axis: contiguous runs.
    for (int ix = 0; ix < n_; ++ix)
      for (int iy = 0; iy < n_; ++iy) line(a, (ix * n_ + iy) * static_cast<size_t>(n_), 1, inv);
    // y-axis.
    for (int ix = 0; ix < n_; ++ix)
      for (int iz = 0; iz < n_; ++iz) line(a, ix * static_cast<size_t>(n_) * n_ + iz, n_, inv);
    // x-axis.
    for (int iy = 0; iy < n_; ++iy)
      for (int iz = 0; iz < n_; ++iz) line(a, static_cast<size_t>(iy) * n_ + iz, n_ * n_, inv);
  }

  void line(std::vector<cplx>& a, size_t base, size_t stride, bool inv) {
    for (int i = 0; i < n_; ++i) buf_in_[i] = a[base + i * stride];
    if (inv)
      fft_.inv(buf_out_, buf_in_);
    else
      fft_.fwd(buf_out_, buf_in_);
    // Eigen's inv already divides by n; undo so the caller applies one
    // global 1/n^3.
    if (inv)
      for (int i = 0; i < n_; ++i) a[base + i * stride] = buf_out_[i] * static_cast<double>(n_);
    else
      for (int i = 0; i < n_; ++i) a[base + i * stride] = buf_out_[i];
  }

  int n_;
  Eigen::FFT<double> fft_;
  std::vector<cplx> buf_in_, buf_out_;
};

}  // namespace isct
