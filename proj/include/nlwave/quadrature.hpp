#pragma once

#include <functional>
#include <vector>

namespace nlwave {

/// One-dimensional Gauss-Legendre rule on the reference interval [-1,1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes and weights of the q-point Gauss-Legendre rule, exact on
/// polynomials of degree <= 2q-1. Cached internally; thread-safe.
const GaussRule& gauss_legendre(int q);

/// Integration policy shared by projections and assembly: Gauss-Legendre
/// order per smooth piece plus whether to split at declared breakpoints.
struct QuadratureRule {
    int order = 16;
    bool split_at_breakpoints = true;
};

/// Integral of f over [a,b] with a single q-point Gauss panel.
double integrate_panel(const std::function<double(double)>& f, double a, double b, int q);

/// Integral of f over [a,b], splitting at the given breakpoints (only those
/// strictly inside (a,b) matter) and applying q-point Gauss per piece.
/// `min_pieces` additionally subdivides every smooth piece uniformly, which
/// keeps oscillatory integrands resolved (used by modal projections).
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureRule& rule,
                 const std::vector<double>& breakpoints = {},
                 int min_pieces = 1);

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
/// Independent of the Gauss machinery; used as a cross-check oracle and for
/// the per-mode Duhamel integrals.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 30);

/// Sorted list of piece boundaries for [a,b]: a, b, every breakpoint inside,
/// and a uniform refinement of each resulting piece into at most `min_pieces`
/// total subdivisions of comparable length.
std::vector<double> piece_boundaries(double a, double b,
                                     const std::vector<double>& breakpoints,
                                     int min_pieces = 1);

} // namespace nlwave
