#include "nlwave/basis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace nlwave {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

[[noreturn]] void bad_mode(BoundaryCondition bc, int k) {
    throw std::domain_error(std::string("mode ") + std::to_string(k) +
                            " is not admissible for " + to_string(bc) + " boundary conditions");
}

} // namespace

const char* to_string(BoundaryCondition bc) {
    switch (bc) {
        case BoundaryCondition::Periodic: return "periodic";
        case BoundaryCondition::Antiperiodic: return "antiperiodic";
        case BoundaryCondition::Neumann: return "neumann";
        case BoundaryCondition::Dirichlet: return "dirichlet";
    }
    return "unknown";
}

BoundaryCondition bc_from_string(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "periodic") return BoundaryCondition::Periodic;
    if (s == "antiperiodic") return BoundaryCondition::Antiperiodic;
    if (s == "neumann") return BoundaryCondition::Neumann;
    if (s == "dirichlet") return BoundaryCondition::Dirichlet;
    throw std::invalid_argument("unknown boundary condition '" + s +
                                "' (expected periodic, antiperiodic, neumann, or dirichlet)");
}

double eigenvalue(BoundaryCondition bc, int k) {
    switch (bc) {
        case BoundaryCondition::Periodic:
            return static_cast<double>(k) * k;
        case BoundaryCondition::Antiperiodic: {
            const double m = k + 0.5;
            return m * m;
        }
        case BoundaryCondition::Neumann:
            if (k < 0) bad_mode(bc, k);
            return static_cast<double>(k) * k;
        case BoundaryCondition::Dirichlet:
            if (k < 1) bad_mode(bc, k);
            return static_cast<double>(k) * k;
    }
    bad_mode(bc, k);
}

std::complex<double> eigenfunction(BoundaryCondition bc, int k, double x) {
    switch (bc) {
        case BoundaryCondition::Periodic: {
            const double t = M_PI * k * x;
            return {kInvSqrt2 * std::cos(t), kInvSqrt2 * std::sin(t)};
        }
        case BoundaryCondition::Antiperiodic: {
            const double t = M_PI * (k + 0.5) * x;
            return {kInvSqrt2 * std::cos(t), kInvSqrt2 * std::sin(t)};
        }
        case BoundaryCondition::Neumann:
            if (k < 0) bad_mode(bc, k);
            if (k == 0) return {kInvSqrt2, 0.0};
            return {std::cos(0.5 * M_PI * k * (x + 1.0)), 0.0};
        case BoundaryCondition::Dirichlet:
            if (k < 1) bad_mode(bc, k);
            return {std::sin(0.5 * M_PI * k * (x + 1.0)), 0.0};
    }
    bad_mode(bc, k);
}

std::complex<double> eigenfunction_derivative(BoundaryCondition bc, int k, double x) {
    switch (bc) {
        case BoundaryCondition::Periodic: {
            const double w = M_PI * k;
            return std::complex<double>(0.0, w) * eigenfunction(bc, k, x);
        }
        case BoundaryCondition::Antiperiodic: {
            const double w = M_PI * (k + 0.5);
            return std::complex<double>(0.0, w) * eigenfunction(bc, k, x);
        }
        case BoundaryCondition::Neumann: {
            if (k < 0) bad_mode(bc, k);
            if (k == 0) return {0.0, 0.0};
            const double w = 0.5 * M_PI * k;
            return {-w * std::sin(w * (x + 1.0)), 0.0};
        }
        case BoundaryCondition::Dirichlet: {
            if (k < 1) bad_mode(bc, k);
            const double w = 0.5 * M_PI * k;
            return {w * std::cos(w * (x + 1.0)), 0.0};
        }
    }
    bad_mode(bc, k);
}

int coefficient_count(BoundaryCondition bc, int M) {
    if (M < 0) throw std::domain_error("cutoff must be nonnegative");
    switch (bc) {
        case BoundaryCondition::Periodic:
        case BoundaryCondition::Antiperiodic:
            return 2 * M + 1;
        case BoundaryCondition::Neumann:
            return M + 1;
        case BoundaryCondition::Dirichlet:
            return M;
    }
    return 0;
}

int flat_index(BoundaryCondition bc, int k, int M) {
    switch (bc) {
        case BoundaryCondition::Periodic:
        case BoundaryCondition::Antiperiodic:
            if (k < -M || k > M) bad_mode(bc, k);
            if (k == 0) return 0;
            return k > 0 ? 2 * k - 1 : -2 * k;
        case BoundaryCondition::Neumann:
            if (k < 0 || k > M) bad_mode(bc, k);
            return k;
        case BoundaryCondition::Dirichlet:
            if (k < 1 || k > M) bad_mode(bc, k);
            return k - 1;
    }
    bad_mode(bc, k);
}

int mode_at(BoundaryCondition bc, int i, int M) {
    if (i < 0 || i >= coefficient_count(bc, M))
        throw std::out_of_range("flat coefficient index out of range");
    switch (bc) {
        case BoundaryCondition::Periodic:
        case BoundaryCondition::Antiperiodic:
            if (i == 0) return 0;
            return (i % 2 == 1) ? (i + 1) / 2 : -i / 2;
        case BoundaryCondition::Neumann:
            return i;
        case BoundaryCondition::Dirichlet:
            return i + 1;
    }
    return 0;
}

namespace {

// Panels per unit interval so that a single Gauss panel never spans much more
// than one oscillation of mode k.
int mode_pieces(BoundaryCondition bc, int k) {
    switch (bc) {
        case BoundaryCondition::Periodic:
            return std::max(1, std::abs(k));
        case BoundaryCondition::Antiperiodic:
            return std::abs(k) + 1;
        case BoundaryCondition::Neumann:
        case BoundaryCondition::Dirichlet:
            return std::max(1, (k + 1) / 2);
    }
    return 1;
}

std::complex<double> project_mode(const std::function<double(double)>& u,
                                  BoundaryCondition bc, int k,
                                  const std::vector<double>& breakpoints,
                                  int quad_order) {
    const std::vector<double> cuts =
        piece_boundaries(-1.0, 1.0, breakpoints, mode_pieces(bc, k));
    const GaussRule& g = gauss_legendre(quad_order);
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        const double mid = 0.5 * (cuts[p] + cuts[p + 1]);
        const double half = 0.5 * (cuts[p + 1] - cuts[p]);
        for (int i = 0; i < quad_order; ++i) {
            const double y = mid + half * g.nodes[i];
            acc += (g.weights[i] * half * u(y)) * std::conj(eigenfunction(bc, k, y));
        }
    }
    return acc;
}

CoefficientVector project_impl(const std::function<double(double)>& u,
                               BoundaryCondition bc, int M,
                               const std::vector<double>& breakpoints,
                               int quad_order, bool parallel) {
    CoefficientVector c;
    c.bc = bc;
    c.cutoff = M;
    const int n = coefficient_count(bc, M);
    c.values.resize(n);
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i)
            c.values[i] = project_mode(u, bc, mode_at(bc, i, M), breakpoints, quad_order);
    } else {
        for (int i = 0; i < n; ++i)
            c.values[i] = project_mode(u, bc, mode_at(bc, i, M), breakpoints, quad_order);
    }
    return c;
}

} // namespace

CoefficientVector project(const std::function<double(double)>& u,
                          BoundaryCondition bc, int M,
                          const std::vector<double>& breakpoints,
                          int quad_order) {
    return project_impl(u, bc, M, breakpoints, quad_order, true);
}

CoefficientVector project_serial(const std::function<double(double)>& u,
                                 BoundaryCondition bc, int M,
                                 const std::vector<double>& breakpoints,
                                 int quad_order) {
    return project_impl(u, bc, M, breakpoints, quad_order, false);
}

std::complex<double> synthesize(const CoefficientVector& c, double x) {
    std::complex<double> acc(0.0, 0.0);
    const int n = c.size();
    for (int i = 0; i < n; ++i)
        acc += c.values[i] * eigenfunction(c.bc, mode_at(c.bc, i, c.cutoff), x);
    return acc;
}

double synthesize_real(const CoefficientVector& c, double x) {
    return synthesize(c, x).real();
}

Eigen::VectorXd synthesize_many(const CoefficientVector& c, const Eigen::VectorXd& x) {
    Eigen::VectorXd out(x.size());
    const int n = static_cast<int>(x.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) out[i] = synthesize_real(c, x[i]);
    return out;
}

Eigen::VectorXd synthesize_many_serial(const CoefficientVector& c, const Eigen::VectorXd& x) {
    Eigen::VectorXd out(x.size());
    const int n = static_cast<int>(x.size());
    for (int i = 0; i < n; ++i) out[i] = synthesize_real(c, x[i]);
    return out;
}

} // namespace nlwave
