#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "nlwave/basis.hpp"
#include "nlwave/micromodulus.hpp"
#include "nlwave/quadrature.hpp"
#include "nlwave/spectral.hpp"

namespace nlwave::fem {

/// Partition of [-1,1] into elements K_e = (nodes[e], nodes[e+1]).
struct Mesh {
    Eigen::VectorXd nodes; // strictly increasing, nodes[0] = -1, nodes[N] = 1

    int element_count() const { return static_cast<int>(nodes.size()) - 1; }
    double a(int e) const { return nodes[e]; }
    double b(int e) const { return nodes[e + 1]; }
    double h(int e) const { return nodes[e + 1] - nodes[e]; }
    double h_min() const;

    /// Element containing x; interior interfaces resolve to the right
    /// element, x = 1 to the last one.
    int element_of(double x) const;

    /// Mirror-symmetric about 0 (needed by the parity-split stiffness forms).
    bool is_symmetric(double tol = 1e-12) const;

    /// Interior nodes x_1..x_{N-1}.
    std::vector<double> interior_interfaces() const;
};

Mesh uniform_mesh(int n_elements);
/// Validates ordering and the [-1,1] span. Throws std::invalid_argument.
Mesh mesh_from_nodes(std::vector<double> nodes);

/// Local Legendre bases. Orthonormal scales P_m to unit L2 norm on each
/// element (mass = identity); Legendre keeps raw P_m(xi) (mass diagonal with
/// entries h/(2m+1)).
enum class BasisNormalization { Orthonormal, Legendre };

/// Discontinuous piecewise-polynomial space: degree-l Legendre basis mapped
/// affinely to every mesh element, dimension N(l+1).
struct PolySpace {
    Mesh mesh;
    int degree = 0;
    BasisNormalization normalization = BasisNormalization::Orthonormal;

    int dim() const { return mesh.element_count() * (degree + 1); }
    int index(int element, int mode) const { return element * (degree + 1) + mode; }

    /// Scale of basis mode m on element e (norm_factor * P_m(xi)).
    double norm_factor(int element, int mode) const;
    /// ||phi_m||^2 on element e.
    double basis_norm2(int element, int mode) const;

    double basis_value(int element, int mode, double x) const;
    double basis_derivative(int element, int mode, double x) const;
    /// All degree+1 basis values on element e at x (Legendre recurrence).
    Eigen::VectorXd basis_values(int element, double x) const;

    /// Field evaluation; x at an interior interface takes the right trace.
    double value(const Eigen::VectorXd& coeffs, double x) const;
    /// One-sided evaluation with the element pinned (interface traces).
    double value_in_element(const Eigen::VectorXd& coeffs, int element, double x) const;
    Eigen::VectorXd values(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& xs) const;
};

PolySpace make_space(Mesh mesh, int degree,
                     BasisNormalization normalization = BasisNormalization::Orthonormal);

/// Dense symmetric matrix with verified flags: symmetry defect measured on
/// the raw assembly (flag set iff < 1e-10), definiteness classified from the
/// smallest eigenvalue against 1e-8 * ||A||_2.
struct DenseOperator {
    enum class Definiteness { PositiveDefinite, PositiveSemidefinite, Indefinite };

    Eigen::MatrixXd matrix; // symmetrized when the defect allows
    bool symmetric = false;
    double symmetry_defect = 0.0;
    Definiteness definiteness = Definiteness::Indefinite;
    double min_eigenvalue = 0.0;
    double operator_norm = 0.0; // largest |eigenvalue|
};

/// Measures symmetry, symmetrizes (when symmetric), and classifies.
DenseOperator classify_operator(Eigen::MatrixXd a);

/// Assembly knobs. quad_order <= 0 means the default degree+4 per smooth
/// piece; modal_cutoff is the eigenmode truncation of the canonical Dirichlet
/// route; parallel toggles the OpenMP row-block loop.
struct AssemblyOptions {
    int quad_order = 0;
    bool split_at_breakpoints = true;
    int modal_cutoff = 256;
    bool parallel = true;
};

/// Elementwise L2 projection; element quadrature split at u's breakpoints.
Eigen::VectorXd l2_project(const PolySpace& space, const std::function<double(double)>& u,
                           const std::vector<double>& breakpoints = {}, int quad_order = 0);

/// Load vector (f, phi_i) for all basis functions.
Eigen::VectorXd load_vector(const PolySpace& space, const std::function<double(double)>& f,
                            const std::vector<double>& breakpoints = {}, int quad_order = 0);

/// Block-diagonal (diagonal) mass matrix.
DenseOperator assemble_mass(const PolySpace& space);

/// Moment R_j^T(x) = int_T ext(x - y) phi_j^T(y) dy with the inner interval
/// split wherever x - y crosses a kernel breakpoint image (rule.split false
/// integrates T as one Gauss panel, for the misalignment demonstrations).
double kernel_moment(const PolySpace& space, int element, int j, double x,
                     const ExtendedKernel& ext, const QuadratureRule& rule = {});

/// Galerkin matrix of u -> int ext(x - s y) u(y) dy (s = +1 convolution,
/// s = -1 the reflected x + y variant), with inner and outer quadrature split
/// at kernel breakpoint images. OpenMP-parallel over row element blocks.
Eigen::MatrixXd convolution_matrix(const PolySpace& space, const ExtendedKernel& ext, int s,
                                   const AssemblyOptions& opts = {});

/// Plain per-entry reference assembly of the same matrix (serial loops,
/// nested 1D quadrature); kept as the comparison oracle for the parallel
/// block assembly.
Eigen::MatrixXd convolution_matrix_serial(const PolySpace& space, const ExtendedKernel& ext,
                                          int s, const AssemblyOptions& opts = {});

/// Matrix of eigenmode moments E(row, dof) = <e_k | phi_dof> for the real
/// eigenbases (Neumann/Dirichlet); rows follow flat mode order, n_modes rows.
Eigen::MatrixXd real_modal_matrix(const PolySpace& space, BoundaryCondition bc, int n_modes);

/// Stiffness of the weak nonlocal operator for the given form:
/// A = c_form * M - (convolution terms of the form's integral representation).
/// Symmetric; at least positive semidefinite whenever the kernel satisfies
/// the positivity condition (the canonical periodic form always carries the
/// constant as an exact zero mode; the other forms are strictly definite for
/// the box kernel). The canonical Dirichlet form assembles
/// its convolution part in coefficient space (modal_cutoff modes); the
/// canonical Neumann form adds the rank-one boundary compensation term.
/// Throws std::domain_error for incompatible (form, kernel) pairs and for the
/// parity-split forms on asymmetric meshes.
DenseOperator assemble_stiffness(const PolySpace& space, const Micromodulus& c,
                                 BoundaryCondition bc, OperatorForm form,
                                 const AssemblyOptions& opts = {});

/// Serial reference of assemble_stiffness (same math through the per-entry
/// reference convolutions).
DenseOperator assemble_stiffness_serial(const PolySpace& space, const Micromodulus& c,
                                        BoundaryCondition bc, OperatorForm form,
                                        AssemblyOptions opts = {});

/// Coefficient map of u(x) -> u(-x) on a symmetric mesh:
/// S[(N-1-e, m), (e, m)] = (-1)^m. Throws std::domain_error otherwise.
Eigen::MatrixXd reflection_matrix(const PolySpace& space);

/// Jump u(x_i^+) - u(x_i^-) at every interior interface, in node order.
Eigen::VectorXd interface_jumps(const PolySpace& space, const Eigen::VectorXd& coeffs);

enum class Side { Left, Right };

/// Boundary trace u(-1^+) or u(1^-).
double boundary_value(const PolySpace& space, const Eigen::VectorXd& coeffs, Side side);

/// One-sided boundary derivative: weighted least-squares polynomial fit of
/// degree <= degree+1 over the two elements nearest the boundary, then the
/// fit's derivative at the boundary point.
double boundary_derivative(const PolySpace& space, const Eigen::VectorXd& coeffs, Side side);

/// ||u_h - exact||_L2 by element quadrature split at the exact field's
/// breakpoints. quad_order <= 0 means degree+6.
double l2_error(const PolySpace& space, const Eigen::VectorXd& coeffs,
                const std::function<double(double)>& exact,
                const std::vector<double>& breakpoints = {}, int quad_order = 0);

/// ||u_h||_L2 (exact through the mass structure).
double l2_norm(const PolySpace& space, const Eigen::VectorXd& coeffs);

} // namespace nlwave::fem
