#include "nlwave/fem.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlwave::fem {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// P_0..P_n at xi.
void legendre_all(int n, double xi, double* out) {
    out[0] = 1.0;
    if (n >= 1) out[1] = xi;
    for (int m = 1; m < n; ++m)
        out[m + 1] = ((2.0 * m + 1.0) * xi * out[m] - m * out[m - 1]) / (m + 1.0);
}

// P'_0..P'_n at xi via P'_{m+1} = (2m+1) P_m + P'_{m-1}.
void legendre_deriv_all(int n, double xi, double* out) {
    std::vector<double> p(n + 1);
    legendre_all(n, xi, p.data());
    out[0] = 0.0;
    if (n >= 1) out[1] = 1.0;
    for (int m = 1; m < n; ++m) out[m + 1] = (2.0 * m + 1.0) * p[m] + out[m - 1];
}

int resolved_order(const PolySpace& space, int quad_order, int extra = 4) {
    return quad_order > 0 ? quad_order : space.degree + extra;
}

} // namespace

double Mesh::h_min() const {
    double m = nodes[1] - nodes[0];
    for (int e = 1; e < element_count(); ++e) m = std::min(m, h(e));
    return m;
}

int Mesh::element_of(double x) const {
    const double* begin = nodes.data();
    const double* end = begin + nodes.size();
    int e = static_cast<int>(std::upper_bound(begin, end, x) - begin) - 1;
    return std::clamp(e, 0, element_count() - 1);
}

bool Mesh::is_symmetric(double tol) const {
    const int n = static_cast<int>(nodes.size());
    for (int i = 0; i < n; ++i)
        if (std::abs(nodes[i] + nodes[n - 1 - i]) > tol) return false;
    return true;
}

std::vector<double> Mesh::interior_interfaces() const {
    std::vector<double> v;
    for (int i = 1; i < element_count(); ++i) v.push_back(nodes[i]);
    return v;
}

Mesh uniform_mesh(int n_elements) {
    if (n_elements < 1) throw std::invalid_argument("uniform_mesh: need at least one element");
    Mesh m;
    m.nodes.resize(n_elements + 1);
    for (int i = 0; i <= n_elements; ++i)
        m.nodes[i] = -1.0 + 2.0 * i / n_elements;
    m.nodes[0] = -1.0;
    m.nodes[n_elements] = 1.0;
    return m;
}

Mesh mesh_from_nodes(std::vector<double> nodes) {
    if (nodes.size() < 2) throw std::invalid_argument("mesh_from_nodes: need at least two nodes");
    if (std::abs(nodes.front() + 1.0) > 1e-12 || std::abs(nodes.back() - 1.0) > 1e-12)
        throw std::invalid_argument("mesh_from_nodes: mesh must span [-1,1]");
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
        if (!(nodes[i] < nodes[i + 1]))
            throw std::invalid_argument("mesh_from_nodes: nodes must be strictly increasing");
    Mesh m;
    m.nodes = Eigen::Map<Eigen::VectorXd>(nodes.data(), static_cast<long>(nodes.size()));
    m.nodes[0] = -1.0;
    m.nodes[m.nodes.size() - 1] = 1.0;
    return m;
}

double PolySpace::norm_factor(int element, int mode) const {
    if (normalization == BasisNormalization::Legendre) return 1.0;
    return std::sqrt((2.0 * mode + 1.0) / mesh.h(element));
}

double PolySpace::basis_norm2(int element, int mode) const {
    if (normalization == BasisNormalization::Legendre)
        return mesh.h(element) / (2.0 * mode + 1.0);
    return 1.0;
}

double PolySpace::basis_value(int element, int mode, double x) const {
    const double xi = (2.0 * x - mesh.a(element) - mesh.b(element)) / mesh.h(element);
    std::vector<double> p(degree + 1);
    legendre_all(mode, xi, p.data());
    return norm_factor(element, mode) * p[mode];
}

double PolySpace::basis_derivative(int element, int mode, double x) const {
    const double xi = (2.0 * x - mesh.a(element) - mesh.b(element)) / mesh.h(element);
    std::vector<double> dp(degree + 1);
    legendre_deriv_all(mode, xi, dp.data());
    return norm_factor(element, mode) * dp[mode] * 2.0 / mesh.h(element);
}

Eigen::VectorXd PolySpace::basis_values(int element, double x) const {
    const double xi = (2.0 * x - mesh.a(element) - mesh.b(element)) / mesh.h(element);
    Eigen::VectorXd v(degree + 1);
    legendre_all(degree, xi, v.data());
    for (int m = 0; m <= degree; ++m) v[m] *= norm_factor(element, m);
    return v;
}

double PolySpace::value(const Eigen::VectorXd& coeffs, double x) const {
    return value_in_element(coeffs, mesh.element_of(x), x);
}

double PolySpace::value_in_element(const Eigen::VectorXd& coeffs, int element, double x) const {
    const Eigen::VectorXd v = basis_values(element, x);
    double s = 0.0;
    for (int m = 0; m <= degree; ++m) s += coeffs[index(element, m)] * v[m];
    return s;
}

Eigen::VectorXd PolySpace::values(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& xs) const {
    Eigen::VectorXd out(xs.size());
    for (long i = 0; i < xs.size(); ++i) out[i] = value(coeffs, xs[i]);
    return out;
}

PolySpace make_space(Mesh mesh, int degree, BasisNormalization normalization) {
    if (degree < 0) throw std::invalid_argument("make_space: degree must be >= 0");
    PolySpace s;
    s.mesh = std::move(mesh);
    s.degree = degree;
    s.normalization = normalization;
    return s;
}

Eigen::VectorXd l2_project(const PolySpace& space, const std::function<double(double)>& u,
                           const std::vector<double>& breakpoints, int quad_order) {
    Eigen::VectorXd c = load_vector(space, u, breakpoints, quad_order);
    for (int e = 0; e < space.mesh.element_count(); ++e)
        for (int m = 0; m <= space.degree; ++m)
            c[space.index(e, m)] /= space.basis_norm2(e, m);
    return c;
}

Eigen::VectorXd load_vector(const PolySpace& space, const std::function<double(double)>& f,
                            const std::vector<double>& breakpoints, int quad_order) {
    const int q = resolved_order(space, quad_order);
    const GaussRule& g = gauss_legendre(q);
    const int nb = space.degree + 1;
    Eigen::VectorXd out(space.dim());
    out.setZero();
    for (int e = 0; e < space.mesh.element_count(); ++e) {
        const auto cuts = piece_boundaries(space.mesh.a(e), space.mesh.b(e), breakpoints);
        for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
            const double mid = 0.5 * (cuts[p] + cuts[p + 1]);
            const double half = 0.5 * (cuts[p + 1] - cuts[p]);
            for (int n = 0; n < q; ++n) {
                const double x = mid + half * g.nodes[n];
                const double w = half * g.weights[n];
                const Eigen::VectorXd v = space.basis_values(e, x);
                const double fx = f(x);
                for (int m = 0; m < nb; ++m) out[space.index(e, m)] += w * fx * v[m];
            }
        }
    }
    return out;
}

DenseOperator assemble_mass(const PolySpace& space) {
    Eigen::MatrixXd m(space.dim(), space.dim());
    m.setZero();
    for (int e = 0; e < space.mesh.element_count(); ++e)
        for (int mo = 0; mo <= space.degree; ++mo)
            m(space.index(e, mo), space.index(e, mo)) = space.basis_norm2(e, mo);
    return classify_operator(std::move(m));
}

namespace {

// Kernel breakpoint images that can matter for element pair (K outer, T
// inner) under the kernel argument x - s*y.
std::vector<double> kernel_breaks_for_pair(const PolySpace& space, int ke, int te,
                                           const ExtendedKernel& ext, int s) {
    const double ka = space.mesh.a(ke), kb = space.mesh.b(ke);
    const double ta = space.mesh.a(te), tb = space.mesh.b(te);
    const double lo = (s > 0) ? ka - tb : ka + ta;
    const double hi = (s > 0) ? kb - ta : kb + tb;
    return ext.breakpoints_in(lo - 1e-9, hi + 1e-9);
}

// int_T ext(x - s*y) phi_j(y) dy for all j at once, inner interval split at
// the images y = s*(x - b).
Eigen::VectorXd moment_all(const PolySpace& space, int te, double x, const ExtendedKernel& ext,
                           int s, const std::vector<double>& kernel_breaks, int q, bool split) {
    const int nb = space.degree + 1;
    std::vector<double> ycuts;
    if (split)
        for (double b : kernel_breaks) ycuts.push_back(s * (x - b));
    const auto ys = piece_boundaries(space.mesh.a(te), space.mesh.b(te), ycuts);
    const GaussRule& g = gauss_legendre(q);
    Eigen::VectorXd out(nb);
    out.setZero();
    for (std::size_t p = 0; p + 1 < ys.size(); ++p) {
        const double mid = 0.5 * (ys[p] + ys[p + 1]);
        const double half = 0.5 * (ys[p + 1] - ys[p]);
        for (int n = 0; n < q; ++n) {
            const double y = mid + half * g.nodes[n];
            out += (half * g.weights[n] * ext(x - s * y)) * space.basis_values(te, y);
        }
    }
    return out;
}

// Dense block of int_K phi_i(x) int_T ext(x - s*y) phi_j(y) dy dx. The outer
// integral is split where a kernel breakpoint image crosses an endpoint of T
// (the moment x -> R_j^T(x) kinks there), the inner one at y = s*(x - b).
Eigen::MatrixXd pair_block(const PolySpace& space, int ke, int te, const ExtendedKernel& ext,
                           int s, int q, bool split) {
    const int nb = space.degree + 1;
    const double ka = space.mesh.a(ke), kb = space.mesh.b(ke);
    const double ta = space.mesh.a(te), tb = space.mesh.b(te);
    const std::vector<double> bps = split
        ? kernel_breaks_for_pair(space, ke, te, ext, s) : std::vector<double>{};
    std::vector<double> xcuts;
    for (double b : bps) {
        xcuts.push_back(b + s * ta);
        xcuts.push_back(b + s * tb);
    }
    const auto xs = piece_boundaries(ka, kb, xcuts);
    const GaussRule& g = gauss_legendre(q);
    Eigen::MatrixXd blk(nb, nb);
    blk.setZero();
    for (std::size_t p = 0; p + 1 < xs.size(); ++p) {
        const double mid = 0.5 * (xs[p] + xs[p + 1]);
        const double half = 0.5 * (xs[p + 1] - xs[p]);
        for (int n = 0; n < q; ++n) {
            const double x = mid + half * g.nodes[n];
            const Eigen::VectorXd pi = space.basis_values(ke, x);
            const Eigen::VectorXd mj = moment_all(space, te, x, ext, s, bps, q, split);
            blk.noalias() += (half * g.weights[n]) * pi * mj.transpose();
        }
    }
    return blk;
}

} // namespace

double kernel_moment(const PolySpace& space, int element, int j, double x,
                     const ExtendedKernel& ext, const QuadratureRule& rule) {
    const double ta = space.mesh.a(element), tb = space.mesh.b(element);
    std::vector<double> bps;
    if (rule.split_at_breakpoints) bps = ext.breakpoints_in(x - tb - 1e-9, x - ta + 1e-9);
    const Eigen::VectorXd all =
        moment_all(space, element, x, ext, +1, bps, rule.order, rule.split_at_breakpoints);
    return all[j];
}

Eigen::MatrixXd convolution_matrix(const PolySpace& space, const ExtendedKernel& ext, int s,
                                   const AssemblyOptions& opts) {
    if (s != 1 && s != -1) throw std::invalid_argument("convolution_matrix: s must be +1 or -1");
    const int q = resolved_order(space, opts.quad_order);
    const int ne = space.mesh.element_count();
    const int nb = space.degree + 1;
    Eigen::MatrixXd out(space.dim(), space.dim());
    out.setZero();
    if (opts.parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int ke = 0; ke < ne; ++ke)
            for (int te = 0; te < ne; ++te)
                out.block(ke * nb, te * nb, nb, nb) =
                    pair_block(space, ke, te, ext, s, q, opts.split_at_breakpoints);
    } else {
        for (int ke = 0; ke < ne; ++ke)
            for (int te = 0; te < ne; ++te)
                out.block(ke * nb, te * nb, nb, nb) =
                    pair_block(space, ke, te, ext, s, q, opts.split_at_breakpoints);
    }
    return out;
}

Eigen::MatrixXd convolution_matrix_serial(const PolySpace& space, const ExtendedKernel& ext,
                                          int s, const AssemblyOptions& opts) {
    if (s != 1 && s != -1) throw std::invalid_argument("convolution_matrix_serial: s must be +1 or -1");
    const QuadratureRule rule{resolved_order(space, opts.quad_order), opts.split_at_breakpoints};
    const int ne = space.mesh.element_count();
    const int nb = space.degree + 1;
    Eigen::MatrixXd out(space.dim(), space.dim());
    out.setZero();
    for (int ke = 0; ke < ne; ++ke) {
        for (int te = 0; te < ne; ++te) {
            const auto bps = opts.split_at_breakpoints
                ? kernel_breaks_for_pair(space, ke, te, ext, s) : std::vector<double>{};
            std::vector<double> xcuts;
            for (double b : bps) {
                xcuts.push_back(b + s * space.mesh.a(te));
                xcuts.push_back(b + s * space.mesh.b(te));
            }
            for (int i = 0; i <= space.degree; ++i) {
                for (int j = 0; j <= space.degree; ++j) {
                    auto outer = [&](double x) {
                        std::vector<double> ycuts;
                        for (double b : bps) ycuts.push_back(s * (x - b));
                        auto inner = [&](double y) {
                            return ext(x - s * y) * space.basis_value(te, j, y);
                        };
                        return space.basis_value(ke, i, x) *
                               integrate(inner, space.mesh.a(te), space.mesh.b(te), rule, ycuts);
                    };
                    out(space.index(ke, i), space.index(te, j)) =
                        integrate(outer, space.mesh.a(ke), space.mesh.b(ke), rule, xcuts);
                }
            }
        }
    }
    return out;
}

Eigen::MatrixXd real_modal_matrix(const PolySpace& space, BoundaryCondition bc, int n_modes) {
    if (bc != BoundaryCondition::Neumann && bc != BoundaryCondition::Dirichlet)
        throw std::domain_error("real_modal_matrix: only the real (Neumann/Dirichlet) bases");
    const int q = space.degree + 6;
    const GaussRule& g = gauss_legendre(q);
    Eigen::MatrixXd e(n_modes, space.dim());
    e.setZero();
    const int ne = space.mesh.element_count();
#pragma omp parallel for schedule(dynamic)
    for (int row = 0; row < n_modes; ++row) {
        const int k = mode_at(bc, row, n_modes);
        for (int te = 0; te < ne; ++te) {
            // Panels per element sized so each spans at most ~half a mode
            // oscillation: the mode has k*h/4 periods across the element.
            const int pieces = std::max(1, static_cast<int>(std::ceil(k * space.mesh.h(te) / 2.0)));
            const auto cuts = piece_boundaries(space.mesh.a(te), space.mesh.b(te), {}, pieces);
            for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
                const double mid = 0.5 * (cuts[p] + cuts[p + 1]);
                const double half = 0.5 * (cuts[p + 1] - cuts[p]);
                for (int n = 0; n < q; ++n) {
                    const double y = mid + half * g.nodes[n];
                    const double ek = eigenfunction(bc, k, y).real();
                    const Eigen::VectorXd v = space.basis_values(te, y);
                    for (int m = 0; m <= space.degree; ++m)
                        e(row, space.index(te, m)) += half * g.weights[n] * ek * v[m];
                }
            }
        }
    }
    return e;
}

DenseOperator classify_operator(Eigen::MatrixXd a) {
    DenseOperator op;
    op.symmetry_defect = (a - a.transpose()).cwiseAbs().maxCoeff();
    op.symmetric = op.symmetry_defect < 1e-10;
    if (op.symmetric) a = 0.5 * (a + a.transpose()).eval();
    op.matrix = std::move(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (op.matrix + op.matrix.transpose()), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = es.eigenvalues();
    op.min_eigenvalue = ev.minCoeff();
    op.operator_norm = ev.cwiseAbs().maxCoeff();
    const double thresh = 1e-8 * std::max(op.operator_norm, 1e-300);
    if (op.min_eigenvalue > thresh)
        op.definiteness = DenseOperator::Definiteness::PositiveDefinite;
    else if (op.min_eigenvalue > -thresh)
        op.definiteness = DenseOperator::Definiteness::PositiveSemidefinite;
    else
        op.definiteness = DenseOperator::Definiteness::Indefinite;
    return op;
}

namespace {

struct ConvTerm {
    double coef;
    ExtendedKernel ext;
    int s;
};

struct StiffnessPlan {
    double mass_multiple = 0.0;
    std::vector<ConvTerm> terms;
    bool needs_symmetric_mesh = false;
    bool rank_one = false; // canonical Neumann boundary compensation
    double rank_one_coef = 0.0;
    bool modal = false; // canonical Dirichlet coefficient-space route
};

StiffnessPlan plan_for(const Micromodulus& c, BoundaryCondition bc, OperatorForm form) {
    if (bc_of(form) != bc)
        throw std::domain_error("assemble_stiffness: boundary condition does not match the form");
    const bool needs_even = form != OperatorForm::CanonicalPeriodic &&
                            form != OperatorForm::CanonicalAntiperiodic;
    if (needs_even && !c.is_even)
        throw std::domain_error("assemble_stiffness: this form requires an even kernel");

    StiffnessPlan p;
    switch (form) {
        case OperatorForm::CanonicalPeriodic:
            p.mass_multiple = silling_constant(c, bc);
            p.terms.push_back({1.0 / kSqrt2, extend(c, ExtensionMode::Periodic2), +1});
            break;
        case OperatorForm::CanonicalAntiperiodic:
            p.mass_multiple = silling_constant(c, bc);
            p.terms.push_back({1.0 / kSqrt2, extend(c, ExtensionMode::Antiperiodic2), +1});
            break;
        case OperatorForm::SimpleNeumann:
        case OperatorForm::SimpleDirichlet: {
            const double cp = silling_constant(c, BoundaryCondition::Periodic);
            p.mass_multiple = 2.0 * kSqrt2 * cp;
            p.needs_symmetric_mesh = true;
            const ExtendedKernel ep = extend(c, ExtensionMode::Periodic2);
            const ExtendedKernel ea = extend(c, ExtensionMode::Antiperiodic2);
            const double refl = form == OperatorForm::SimpleNeumann ? 1.0 : -1.0;
            p.terms.push_back({0.5, ep, +1});
            p.terms.push_back({0.5 * refl, ep, -1});
            p.terms.push_back({0.5, ea, +1});
            p.terms.push_back({-0.5 * refl, ea, -1});
            break;
        }
        case OperatorForm::CanonicalNeumann: {
            p.mass_multiple = silling_constant(c, bc);
            const HalfWaveSplit hw = half_wave_split(c);
            p.terms.push_back({0.5, extend(hw.c1, ExtensionMode::Periodic2), +1});
            p.terms.push_back({0.5, extend(hw.c1, ExtensionMode::Periodic2), -1});
            p.terms.push_back({-0.5, extend(hw.c2, ExtensionMode::Periodic2), +1});
            p.terms.push_back({-0.5, extend(hw.c2, ExtensionMode::Periodic2), -1});
            p.rank_one = true;
            p.rank_one_coef = hw.k_n / kSqrt2;
            break;
        }
        case OperatorForm::CanonicalDirichlet:
            p.mass_multiple = silling_constant(c, bc);
            p.modal = true;
            break;
    }
    return p;
}

Eigen::VectorXd basis_moments(const PolySpace& space) {
    Eigen::VectorXd g(space.dim());
    g.setZero();
    for (int e = 0; e < space.mesh.element_count(); ++e) {
        const double h = space.mesh.h(e);
        g[space.index(e, 0)] =
            space.normalization == BasisNormalization::Legendre ? h : std::sqrt(h);
    }
    return g;
}

DenseOperator assemble_with(const PolySpace& space, const Micromodulus& c, BoundaryCondition bc,
                            OperatorForm form, const AssemblyOptions& opts,
                            bool serial) {
    const StiffnessPlan plan = plan_for(c, bc, form);
    if (plan.needs_symmetric_mesh && !space.mesh.is_symmetric())
        throw std::domain_error(
            "assemble_stiffness: the parity-split forms need a mirror-symmetric mesh");

    Eigen::MatrixXd a = plan.mass_multiple * assemble_mass(space).matrix;
    for (const ConvTerm& t : plan.terms) {
        const Eigen::MatrixXd b = serial ? convolution_matrix_serial(space, t.ext, t.s, opts)
                                         : convolution_matrix(space, t.ext, t.s, opts);
        a.noalias() -= t.coef * b;
    }
    if (plan.rank_one) {
        const Eigen::VectorXd g = basis_moments(space);
        a.noalias() -= plan.rank_one_coef * g * g.transpose();
    }
    if (plan.modal) {
        const int cutoff = std::max(opts.modal_cutoff, 4);
        const CoefficientVector gamma = project(
            [&c](double x) { return c(x); }, bc, cutoff, c.breakpoints);
        const Eigen::MatrixXd e = real_modal_matrix(space, bc, coefficient_count(bc, cutoff));
        Eigen::VectorXd d(e.rows());
        for (long i = 0; i < d.size(); ++i) d[i] = gamma.values[i].real();
        a.noalias() -= e.transpose() * d.asDiagonal() * e;
    }
    return classify_operator(std::move(a));
}

} // namespace

DenseOperator assemble_stiffness(const PolySpace& space, const Micromodulus& c,
                                 BoundaryCondition bc, OperatorForm form,
                                 const AssemblyOptions& opts) {
    return assemble_with(space, c, bc, form, opts, false);
}

DenseOperator assemble_stiffness_serial(const PolySpace& space, const Micromodulus& c,
                                        BoundaryCondition bc, OperatorForm form,
                                        AssemblyOptions opts) {
    opts.parallel = false;
    return assemble_with(space, c, bc, form, opts, true);
}

Eigen::MatrixXd reflection_matrix(const PolySpace& space) {
    if (!space.mesh.is_symmetric())
        throw std::domain_error("reflection_matrix: mesh must be mirror-symmetric");
    const int ne = space.mesh.element_count();
    Eigen::MatrixXd s(space.dim(), space.dim());
    s.setZero();
    for (int e = 0; e < ne; ++e)
        for (int m = 0; m <= space.degree; ++m)
            s(space.index(ne - 1 - e, m), space.index(e, m)) = (m % 2 == 0) ? 1.0 : -1.0;
    return s;
}

Eigen::VectorXd interface_jumps(const PolySpace& space, const Eigen::VectorXd& coeffs) {
    const int ne = space.mesh.element_count();
    Eigen::VectorXd jumps(ne - 1);
    for (int i = 1; i < ne; ++i) {
        const double x = space.mesh.nodes[i];
        jumps[i - 1] = space.value_in_element(coeffs, i, x) -
                       space.value_in_element(coeffs, i - 1, x);
    }
    return jumps;
}

double boundary_value(const PolySpace& space, const Eigen::VectorXd& coeffs, Side side) {
    const int ne = space.mesh.element_count();
    return side == Side::Left ? space.value_in_element(coeffs, 0, -1.0)
                              : space.value_in_element(coeffs, ne - 1, 1.0);
}

double boundary_derivative(const PolySpace& space, const Eigen::VectorXd& coeffs, Side side) {
    const int ne = space.mesh.element_count();
    const int e0 = side == Side::Left ? 0 : std::max(0, ne - 2);
    const int e1 = side == Side::Left ? std::min(1, ne - 1) : ne - 1;
    const double x0 = side == Side::Left ? -1.0 : 1.0;
    const int fit_degree = space.degree + 1;
    const int q = space.degree + 3;
    const GaussRule& g = gauss_legendre(q);

    std::vector<double> xs, ws, us;
    for (int e = e0; e <= e1; ++e) {
        const double mid = 0.5 * (space.mesh.a(e) + space.mesh.b(e));
        const double half = 0.5 * space.mesh.h(e);
        for (int n = 0; n < q; ++n) {
            xs.push_back(mid + half * g.nodes[n]);
            ws.push_back(std::sqrt(half * g.weights[n]));
            us.push_back(space.value_in_element(coeffs, e, xs.back()));
        }
    }
    const int rows = static_cast<int>(xs.size());
    const int cols = fit_degree + 1;
    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd rhs(rows);
    for (int r = 0; r < rows; ++r) {
        double p = 1.0;
        for (int cdeg = 0; cdeg < cols; ++cdeg) {
            design(r, cdeg) = ws[r] * p;
            p *= xs[r] - x0;
        }
        rhs[r] = ws[r] * us[r];
    }
    const Eigen::VectorXd fit = design.colPivHouseholderQr().solve(rhs);
    return fit.size() > 1 ? fit[1] : 0.0;
}

double l2_error(const PolySpace& space, const Eigen::VectorXd& coeffs,
                const std::function<double(double)>& exact,
                const std::vector<double>& breakpoints, int quad_order) {
    const int q = quad_order > 0 ? quad_order : space.degree + 6;
    const GaussRule& g = gauss_legendre(q);
    double total = 0.0;
    for (int e = 0; e < space.mesh.element_count(); ++e) {
        const auto cuts = piece_boundaries(space.mesh.a(e), space.mesh.b(e), breakpoints);
        for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
            const double mid = 0.5 * (cuts[p] + cuts[p + 1]);
            const double half = 0.5 * (cuts[p + 1] - cuts[p]);
            for (int n = 0; n < q; ++n) {
                const double x = mid + half * g.nodes[n];
                const double d = space.value_in_element(coeffs, e, x) - exact(x);
                total += half * g.weights[n] * d * d;
            }
        }
    }
    return std::sqrt(total);
}

double l2_norm(const PolySpace& space, const Eigen::VectorXd& coeffs) {
    double total = 0.0;
    for (int e = 0; e < space.mesh.element_count(); ++e)
        for (int m = 0; m <= space.degree; ++m) {
            const double c = coeffs[space.index(e, m)];
            total += c * c * space.basis_norm2(e, m);
        }
    return std::sqrt(total);
}

} // namespace nlwave::fem
