#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "nlwave/basis.hpp"

namespace nlwave {

/// Interaction kernel C on [-1,1]. Kernels carry their kink/jump locations so
/// quadrature can split panels there, a declared-and-verified evenness flag,
/// and a cached L2 norm.
struct Micromodulus {
    std::function<double(double)> evaluator;
    std::vector<double> breakpoints; // sorted, strictly inside (-1,1)
    bool is_even = true;
    double l2_norm = 0.0;
    std::string name = "custom";

    double operator()(double x) const { return evaluator(x); }
};

/// Builds a kernel from an evaluator and its breakpoints; verifies evenness by
/// sampling and computes the L2 norm with breakpoint-aligned quadrature.
Micromodulus make_micromodulus(std::function<double(double)> evaluator,
                               std::vector<double> breakpoints,
                               std::string name = "custom");

/// C(x) = 1 on [-1/2,1/2], 0 elsewhere.
Micromodulus unit_box();

/// C(x) = 1 on [-width/2, width/2], 0 elsewhere. width=1 recovers unit_box.
Micromodulus scaled_box(double width);

/// C(x) = exp(-x^2/(2 sigma^2)) on [-width/2, width/2], 0 elsewhere.
Micromodulus truncated_gaussian(double sigma, double width = 2.0);

/// C identically zero.
Micromodulus zero_kernel();

/// Piecewise-linear kernel through the given (x, value) samples; zero outside
/// the sampled range. Samples with x >= 0 only are mirrored to an even kernel.
Micromodulus kernel_from_samples(std::vector<std::pair<double, double>> samples,
                                 std::string name = "table");

/// Loads kernel samples from a CSV file of "x,value" rows ('#' comments and
/// blank lines ignored) and builds the piecewise-linear kernel.
Micromodulus kernel_from_csv(const std::string& path);

/// Parses a kernel selector: "unitbox", "box:<width>", "gauss:<sigma>" or
/// "gauss:<sigma>:<width>", "zero", "csv:<path>".
/// Throws std::invalid_argument on malformed selectors.
Micromodulus kernel_from_selector(const std::string& selector);

/// Integral of C over (-1,1), split at its breakpoints.
double kernel_integral(const Micromodulus& c);

/// The constant that makes the nonlocal operator act as a multiple of the
/// identity at infinite horizon: (1/sqrt(2)) * integral(C) for periodic and
/// antiperiodic conditions, integral(C) for the canonical Neumann/Dirichlet
/// constructions.
double silling_constant(const Micromodulus& c, BoundaryCondition bc);

enum class ExtensionMode { Periodic2, Antiperiodic2 };

/// Kernel extended from [-1,1] to the whole line: 2-periodic, or 2-antiperiodic
/// (each shift by 2 flips the sign).
struct ExtendedKernel {
    ExtensionMode mode = ExtensionMode::Periodic2;
    std::function<double(double)> evaluator;
    std::vector<double> base_breakpoints; // within [-1,1], endpoints included

    double operator()(double x) const { return evaluator(x); }

    /// All breakpoint images b + 2m that land in [lo, hi], sorted and deduped.
    std::vector<double> breakpoints_in(double lo, double hi) const;
};

ExtendedKernel extend(const Micromodulus& c, ExtensionMode mode);

/// Decomposition C = C1 + C2 with C1(1-x) = C1(x) and C2(1-x) = -C2(x) on
/// [0,1/2]:
///   C1(x) = (1/2)[C(|x|) + C(1-|x|)],  C2(x) = (1/2)[C(|x|) - C(1-|x|)].
/// k_n is the boundary compensation constant of the canonical Neumann
/// integral form:
///   k_n = -((sqrt(2)-1)/2) * integral(C1) + ((sqrt(2)+1)/2) * integral(C2).
struct HalfWaveSplit {
    Micromodulus c1;
    Micromodulus c2;
    double k_n = 0.0;
};

/// Splits an even kernel. Throws std::domain_error when c is not even.
HalfWaveSplit half_wave_split(const Micromodulus& c);

enum class Parity { Even, Odd };

/// Orthogonal parity projection: (u(x) + u(-x))/2 or (u(x) - u(-x))/2.
std::function<double(double)> parity_project(std::function<double(double)> u, Parity parity);

} // namespace nlwave
