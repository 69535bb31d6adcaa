#pragma once

#include <complex>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "nlwave/quadrature.hpp"

namespace nlwave {

/// Boundary behavior imposed on (-1,1). Each choice selects a complete
/// orthonormal eigenbasis of the underlying second-difference operator.
enum class BoundaryCondition { Periodic, Antiperiodic, Neumann, Dirichlet };

const char* to_string(BoundaryCondition bc);

/// Parses "periodic", "antiperiodic", "neumann", "dirichlet" (case-insensitive).
/// Throws std::invalid_argument on anything else.
BoundaryCondition bc_from_string(std::string_view name);

/// Eigenvalue of mode k.
///   periodic      k^2          for k in Z
///   antiperiodic  (k + 1/2)^2  for k in Z
///   neumann       k^2          for k >= 0
///   dirichlet     k^2          for k >= 1
/// Throws std::domain_error when k is outside the admissible range.
double eigenvalue(BoundaryCondition bc, int k);

/// Eigenfunction of mode k evaluated at x.
///   periodic      (1/sqrt(2)) exp(i pi k x)
///   antiperiodic  (1/sqrt(2)) exp(i pi (k+1/2) x)
///   neumann       1/sqrt(2) for k = 0, cos(k pi/2 (x+1)) for k >= 1
///   dirichlet     sin(k pi/2 (x+1)) for k >= 1
/// The Neumann and Dirichlet families are real-valued; the imaginary part of
/// the returned value is exactly zero for them.
std::complex<double> eigenfunction(BoundaryCondition bc, int k, double x);

/// d/dx of eigenfunction(bc, k, x).
std::complex<double> eigenfunction_derivative(BoundaryCondition bc, int k, double x);

/// Number of coefficients kept at cutoff M: 2M+1 for periodic/antiperiodic
/// (modes -M..M), M+1 for neumann (0..M), M for dirichlet (1..M).
int coefficient_count(BoundaryCondition bc, int M);

/// Position of mode k in the flat coefficient layout. Periodic/antiperiodic
/// interleave as 0, 1, -1, 2, -2, ...; neumann stores k at k; dirichlet
/// stores k at k-1. Throws std::domain_error when k is not kept at cutoff M.
int flat_index(BoundaryCondition bc, int k, int M);

/// Inverse of flat_index: the mode stored at flat position i.
int mode_at(BoundaryCondition bc, int i, int M);

/// Truncated coefficient vector of a function in the eigenbasis of bc.
/// values[i] holds the inner product <e_{mode_at(i)} | u> = integral of
/// conj(e_k(y)) u(y) over (-1,1).
struct CoefficientVector {
    BoundaryCondition bc = BoundaryCondition::Periodic;
    int cutoff = 0;
    Eigen::VectorXcd values;

    int size() const { return static_cast<int>(values.size()); }

    /// Coefficient of mode k (flat lookup).
    std::complex<double> coeff(int k) const { return values[flat_index(bc, k, cutoff)]; }

    /// l2 norm of the coefficients; approximates the L2 norm of the function
    /// when the cutoff captures it (Parseval).
    double l2_norm() const { return values.norm(); }
};

/// Projects u onto the first coefficient_count(bc, M) modes by panelwise
/// Gauss-Legendre quadrature. Panels are split at the given breakpoints of u
/// and refined so that no panel spans more than about one oscillation of the
/// mode being projected. Parallelized over modes; u must be safe to call
/// from several threads at once.
CoefficientVector project(const std::function<double(double)>& u,
                          BoundaryCondition bc, int M,
                          const std::vector<double>& breakpoints = {},
                          int quad_order = 16);

/// Plain-loop reference implementation of project with identical semantics.
CoefficientVector project_serial(const std::function<double(double)>& u,
                                 BoundaryCondition bc, int M,
                                 const std::vector<double>& breakpoints = {},
                                 int quad_order = 16);

/// Evaluates the truncated expansion sum_k c_k e_k(x).
std::complex<double> synthesize(const CoefficientVector& c, double x);

/// Real part of synthesize; the natural evaluation for real-valued data.
double synthesize_real(const CoefficientVector& c, double x);

/// synthesize_real at many points, parallelized over evaluation points.
Eigen::VectorXd synthesize_many(const CoefficientVector& c, const Eigen::VectorXd& x);

/// Serial reference implementation of synthesize_many.
Eigen::VectorXd synthesize_many_serial(const CoefficientVector& c, const Eigen::VectorXd& x);

} // namespace nlwave
