#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace isct {

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Gauss-Legendre rule mapped to [a, b].
void gauss_legendre_ab(int n, double a, double b, std::vector<double>& nodes,
                       std::vector<double>& weights);

// Adaptive Simpson on [a, b]; the integrand must be continuous there.
// Callers split at known kinks before invoking.
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double tol, int max_depth = 24);

// Adaptive Simpson split at the given interior breakpoints.
double adaptive_integrate_split(const std::function<double(double)>& f, double a, double b,
                                std::vector<double> breakpoints, double tol);

}  // namespace isct
