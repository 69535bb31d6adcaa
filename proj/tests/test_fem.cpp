#include <cmath>

#include <doctest.h>

#include "nlwave/fem.hpp"

using namespace nlwave;
using namespace nlwave::fem;

namespace {
const double kPi = std::acos(-1.0);
const double kSqrt2 = std::sqrt(2.0);
} // namespace

TEST_CASE("mesh construction and lookup") {
    Mesh m = uniform_mesh(8);
    CHECK(m.element_count() == 8);
    CHECK(m.nodes[0] == -1.0);
    CHECK(m.nodes[8] == 1.0);
    CHECK(m.h(3) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(m.h_min() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(m.is_symmetric());
    CHECK(m.element_of(-1.0) == 0);
    CHECK(m.element_of(1.0) == 7);
    CHECK(m.element_of(0.0) == 4); // interface resolves right
    CHECK(m.element_of(-0.1) == 3);
    CHECK(m.interior_interfaces().size() == 7);

    Mesh nm = mesh_from_nodes({-1.0, -0.3, 0.4, 1.0});
    CHECK(nm.element_count() == 3);
    CHECK_FALSE(nm.is_symmetric());
    CHECK_THROWS_AS(mesh_from_nodes({-1.0, 0.5, 0.2, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(mesh_from_nodes({-0.9, 0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("mass matrices in both normalizations") {
    // orthonormal: identity even on a nonuniform mesh
    PolySpace s = make_space(mesh_from_nodes({-1.0, -0.3, 0.4, 1.0}), 3);
    DenseOperator m = assemble_mass(s);
    CHECK((m.matrix - Eigen::MatrixXd::Identity(s.dim(), s.dim())).cwiseAbs().maxCoeff() <
          1e-13);
    CHECK(m.symmetric);
    CHECK(m.definiteness == DenseOperator::Definiteness::PositiveDefinite);

    // raw Legendre: diagonal h/(2m+1)
    PolySpace sl = make_space(uniform_mesh(4), 2, BasisNormalization::Legendre);
    DenseOperator ml = assemble_mass(sl);
    for (int e = 0; e < 4; ++e)
        for (int mode = 0; mode <= 2; ++mode) {
            CHECK(ml.matrix(sl.index(e, mode), sl.index(e, mode)) ==
                  doctest::Approx(0.5 / (2 * mode + 1)).epsilon(1e-13));
            CHECK(sl.basis_norm2(e, mode) == doctest::Approx(0.5 / (2 * mode + 1)).epsilon(1e-13));
        }
    CHECK(ml.matrix(sl.index(0, 1), sl.index(0, 2)) == doctest::Approx(0.0).scale(1.0));
    CHECK(ml.matrix(sl.index(0, 0), sl.index(1, 0)) == doctest::Approx(0.0).scale(1.0));
    CHECK(ml.min_eigenvalue == doctest::Approx(0.1).epsilon(1e-10));

    // degree 0 Legendre mass is just the element length
    PolySpace s0 = make_space(uniform_mesh(5), 0, BasisNormalization::Legendre);
    CHECK(assemble_mass(s0).matrix(2, 2) == doctest::Approx(0.4).epsilon(1e-13));
}

TEST_CASE("projection is exact on represented polynomials") {
    for (BasisNormalization n : {BasisNormalization::Orthonormal, BasisNormalization::Legendre}) {
        PolySpace s = make_space(uniform_mesh(6), 3, n);
        auto f = [](double x) { return x * x * x - x + 0.25; };
        Eigen::VectorXd u = l2_project(s, f);
        CHECK(l2_error(s, u, f) < 1e-13);
        CHECK(s.value(u, 0.37) == doctest::Approx(f(0.37)).epsilon(1e-12));
        CHECK(l2_norm(s, u) ==
              doctest::Approx(std::sqrt(integrate(
                  [&f](double x) { return f(x) * f(x); }, -1.0, 1.0, QuadratureRule{12})))
                  .epsilon(1e-12));
    }
}

TEST_CASE("projection error decays at the expected rate") {
    auto f = [](double x) { return std::sin(kPi * x); };
    for (int ell : {0, 1, 2}) {
        double prev = 0.0;
        for (int n : {8, 16, 32}) {
            PolySpace s = make_space(uniform_mesh(n), ell);
            const double err = l2_error(s, l2_project(s, f), f);
            if (n > 8) {
                const double rate = std::log2(prev / err);
                CHECK(rate == doctest::Approx(ell + 1.0).epsilon(0.12));
            }
            prev = err;
        }
    }
}

TEST_CASE("field evaluation takes one-sided traces at interfaces") {
    PolySpace s = make_space(uniform_mesh(4), 1);
    auto sgn = [](double x) { return x < 0.0 ? -1.0 : 1.0; };
    Eigen::VectorXd u = l2_project(s, sgn, {0.0});
    CHECK(s.value(u, 0.0) == doctest::Approx(1.0).epsilon(1e-12));             // right trace
    CHECK(s.value_in_element(u, 1, 0.0) == doctest::Approx(-1.0).epsilon(1e-12)); // pinned left

    Eigen::VectorXd j = interface_jumps(s, u);
    REQUIRE(j.size() == 3);
    CHECK(j[0] == doctest::Approx(0.0).scale(1.0));
    CHECK(j[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(j[2] == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("boundary traces and one-sided derivatives") {
    PolySpace s = make_space(uniform_mesh(8), 2);
    auto f = [](double x) { return x * x; };
    Eigen::VectorXd u = l2_project(s, f);
    CHECK(boundary_value(s, u, Side::Left) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(boundary_value(s, u, Side::Right) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(boundary_derivative(s, u, Side::Left) == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(boundary_derivative(s, u, Side::Right) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("reflection matrix represents u(-x)") {
    PolySpace s = make_space(uniform_mesh(4), 2);
    Eigen::MatrixXd r = reflection_matrix(s);
    CHECK((r * r - Eigen::MatrixXd::Identity(s.dim(), s.dim())).cwiseAbs().maxCoeff() < 1e-14);
    auto f = [](double x) { return x * x + 0.5 * x; };
    Eigen::VectorXd u = l2_project(s, f);
    Eigen::VectorXd v = r * u;
    for (double x : {-0.9, -0.3, 0.2, 0.8})
        CHECK(s.value(v, x) == doctest::Approx(f(-x)).epsilon(1e-12));
    CHECK_THROWS_AS(reflection_matrix(make_space(mesh_from_nodes({-1.0, 0.3, 1.0}), 1)),
                    std::domain_error);
}

TEST_CASE("kernel moment: breakpoint splitting against an adaptive oracle") {
    PolySpace s = make_space(uniform_mesh(8), 2);
    const ExtendedKernel ext = extend(unit_box(), ExtensionMode::Periodic2);
    const int e = 4; // [0, 0.25]; x - y crosses the kernel edge at y = 0.1
    const double x = 0.6;
    auto integrand = [&](double y) { return ext(x - y) * s.basis_value(e, 1, y); };
    // integrate the two smooth pieces separately; the integrand jumps at 0.1
    const double oracle = adaptive_simpson(integrand, s.mesh.a(e), 0.1, 1e-12) +
                          adaptive_simpson(integrand, 0.1, s.mesh.b(e), 1e-12);

    const double split = kernel_moment(s, e, 1, x, ext, QuadratureRule{16, true});
    const double unsplit = kernel_moment(s, e, 1, x, ext, QuadratureRule{16, false});
    CHECK(std::abs(split - oracle) < 5e-9);
    CHECK(std::abs(unsplit - oracle) > 1e-6);
}

TEST_CASE("convolution matrix entries against a nested adaptive oracle") {
    PolySpace s = make_space(uniform_mesh(4), 1);
    const ExtendedKernel ext = extend(unit_box(), ExtensionMode::Periodic2);
    AssemblyOptions opts;
    opts.quad_order = 16;
    for (int sgn : {+1, -1}) {
        Eigen::MatrixXd a = convolution_matrix(s, ext, sgn, opts);
        const int i = s.index(3, 0), j = s.index(0, 1);
        auto inner = [&](double x) {
            return adaptive_simpson(
                [&](double y) {
                    return ext(x - sgn * y) * s.basis_value(0, 1, y);
                },
                s.mesh.a(0), s.mesh.b(0), 1e-12);
        };
        const double oracle = adaptive_simpson(
            [&](double x) { return inner(x) * s.basis_value(3, 0, x); }, s.mesh.a(3),
            s.mesh.b(3), 1e-11);
        CHECK(a(i, j) == doctest::Approx(oracle).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("parallel and serial assemblies agree") {
    PolySpace s = make_space(uniform_mesh(6), 2);
    const ExtendedKernel ext = extend(truncated_gaussian(0.3, 1.2), ExtensionMode::Periodic2);
    Eigen::MatrixXd ap = convolution_matrix(s, ext, +1);
    Eigen::MatrixXd as = convolution_matrix_serial(s, ext, +1);
    CHECK((ap - as).cwiseAbs().maxCoeff() < 1e-13);

    DenseOperator kp = assemble_stiffness(s, truncated_gaussian(0.3, 1.2),
                                          BoundaryCondition::Dirichlet,
                                          OperatorForm::SimpleDirichlet);
    DenseOperator ks = assemble_stiffness_serial(s, truncated_gaussian(0.3, 1.2),
                                                 BoundaryCondition::Dirichlet,
                                                 OperatorForm::SimpleDirichlet);
    CHECK((kp.matrix - ks.matrix).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("interaction range widens the sparsity pattern") {
    PolySpace s = make_space(uniform_mesh(16), 0);
    auto nnz = [&](double width) {
        Eigen::MatrixXd a =
            convolution_matrix(s, extend(scaled_box(width), ExtensionMode::Periodic2), +1);
        const double floor = 1e-12 * a.cwiseAbs().maxCoeff();
        int count = 0;
        for (int i = 0; i < a.rows(); ++i)
            for (int j = 0; j < a.cols(); ++j)
                if (std::abs(a(i, j)) > floor) ++count;
        return count;
    };
    const int n1 = nnz(0.25), n2 = nnz(0.5), n3 = nnz(1.0);
    CHECK(n1 < n2);
    CHECK(n2 < n3);
}

TEST_CASE("stiffness matrices: symmetry and definiteness per form") {
    PolySpace s = make_space(uniform_mesh(8), 1);
    const Micromodulus c = unit_box();

    DenseOperator ap = assemble_stiffness(s, c, BoundaryCondition::Periodic,
                                          OperatorForm::CanonicalPeriodic);
    CHECK(ap.symmetric);
    CHECK(ap.symmetry_defect < 1e-10);
    // the constant is an exact zero mode of the periodic form
    CHECK(ap.definiteness == DenseOperator::Definiteness::PositiveSemidefinite);
    Eigen::VectorXd ones = l2_project(s, [](double) { return 1.0; });
    CHECK((ap.matrix * ones).cwiseAbs().maxCoeff() < 1e-8);

    DenseOperator aa = assemble_stiffness(s, c, BoundaryCondition::Antiperiodic,
                                          OperatorForm::CanonicalAntiperiodic);
    CHECK(aa.symmetric);
    CHECK(aa.definiteness == DenseOperator::Definiteness::PositiveDefinite);

    DenseOperator ad = assemble_stiffness(s, c, BoundaryCondition::Dirichlet,
                                          OperatorForm::SimpleDirichlet);
    CHECK(ad.symmetric);
    CHECK(ad.definiteness == DenseOperator::Definiteness::PositiveDefinite);

    DenseOperator an = assemble_stiffness(s, c, BoundaryCondition::Neumann,
                                          OperatorForm::SimpleNeumann);
    CHECK(an.symmetric);
    CHECK(an.definiteness != DenseOperator::Definiteness::Indefinite);
    // the box kernel keeps this variant strictly positive: phi(0) = 1
    CHECK(an.min_eigenvalue > 0.5);

    DenseOperator acn = assemble_stiffness(s, c, BoundaryCondition::Neumann,
                                           OperatorForm::CanonicalNeumann);
    CHECK(acn.symmetric);
    CHECK(acn.definiteness != DenseOperator::Definiteness::Indefinite);

    DenseOperator acd = assemble_stiffness(s, c, BoundaryCondition::Dirichlet,
                                           OperatorForm::CanonicalDirichlet);
    CHECK(acd.symmetric);
    CHECK(acd.definiteness != DenseOperator::Definiteness::Indefinite);
}

TEST_CASE("stiffness acts as the operator on constants") {
    // op(1) = phi(0) for the Neumann variants; the Galerkin image of the
    // constant must equal phi(0) M 1 through four extension terms (simple)
    // or the half-wave terms plus the rank-one compensation (canonical).
    PolySpace s = make_space(uniform_mesh(8), 2);
    const Micromodulus c = unit_box();
    Eigen::VectorXd ones = l2_project(s, [](double) { return 1.0; });
    Eigen::MatrixXd m = assemble_mass(s).matrix;

    Eigen::MatrixXd an = assemble_stiffness(s, c, BoundaryCondition::Neumann,
                                            OperatorForm::SimpleNeumann)
                             .matrix;
    CHECK((an * ones - m * ones).cwiseAbs().maxCoeff() < 1e-8);

    Eigen::MatrixXd acn = assemble_stiffness(s, c, BoundaryCondition::Neumann,
                                             OperatorForm::CanonicalNeumann)
                              .matrix;
    const double phi0 = 1.0 - 1.0 / kSqrt2;
    CHECK((acn * ones - phi0 * (m * ones)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("Rayleigh quotients of projected eigenfunctions meet the multipliers") {
    const Micromodulus c = unit_box();
    PolySpace s = make_space(uniform_mesh(32), 2);

    auto rayleigh = [&](const DenseOperator& a, const std::function<double(double)>& f) {
        Eigen::VectorXd u = l2_project(s, f);
        return u.dot(a.matrix * u) / u.squaredNorm(); // orthonormal basis: M = I
    };

    DenseOperator ap = assemble_stiffness(s, c, BoundaryCondition::Periodic,
                                          OperatorForm::CanonicalPeriodic);
    CHECK(rayleigh(ap, [](double x) { return std::cos(kPi * x); }) ==
          doctest::Approx(1.0 / kSqrt2 - kSqrt2 / kPi).epsilon(5e-3));

    DenseOperator an = assemble_stiffness(s, c, BoundaryCondition::Neumann,
                                          OperatorForm::SimpleNeumann);
    CHECK(rayleigh(an, [](double x) { return std::cos(kPi / 2.0 * (x + 1.0)); }) ==
          doctest::Approx(2.0 - 2.0 * kSqrt2 / kPi).epsilon(5e-3));

    DenseOperator ad = assemble_stiffness(s, c, BoundaryCondition::Dirichlet,
                                          OperatorForm::CanonicalDirichlet);
    CHECK(rayleigh(ad, [](double x) { return std::sin(kPi / 2.0 * (x + 1.0)); }) ==
          doctest::Approx(1.0 - 2.0 * kSqrt2 / kPi).epsilon(5e-2));
}

TEST_CASE("form and mesh preconditions are enforced") {
    PolySpace s = make_space(uniform_mesh(4), 1);
    CHECK_THROWS_AS(assemble_stiffness(s, unit_box(), BoundaryCondition::Periodic,
                                       OperatorForm::SimpleNeumann),
                    std::domain_error);
    PolySpace sa = make_space(mesh_from_nodes({-1.0, -0.2, 1.0}), 1);
    CHECK_THROWS_AS(assemble_stiffness(sa, unit_box(), BoundaryCondition::Neumann,
                                       OperatorForm::SimpleNeumann),
                    std::domain_error);
    // canonical periodic has no symmetry requirement
    CHECK_NOTHROW(assemble_stiffness(sa, unit_box(), BoundaryCondition::Periodic,
                                     OperatorForm::CanonicalPeriodic));
}

TEST_CASE("zero kernel yields the zero operator") {
    PolySpace s = make_space(uniform_mesh(4), 1);
    DenseOperator a = assemble_stiffness(s, zero_kernel(), BoundaryCondition::Periodic,
                                         OperatorForm::CanonicalPeriodic);
    CHECK(a.matrix.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("modal moment matrix reproduces coefficients of represented functions") {
    PolySpace s = make_space(uniform_mesh(8), 2);
    const int n_modes = coefficient_count(BoundaryCondition::Dirichlet, 6);
    Eigen::MatrixXd e = real_modal_matrix(s, BoundaryCondition::Dirichlet, n_modes);
    REQUIRE(e.rows() == n_modes);
    REQUIRE(e.cols() == s.dim());
    // <e_k | u_h> for u_h = projection of a smooth field matches direct quadrature
    auto f = [](double x) { return x * (1.0 - x * x); };
    Eigen::VectorXd u = l2_project(s, f);
    Eigen::VectorXd moments = e * u;
    for (int k = 1; k <= 6; ++k) {
        const double direct = integrate(
            [&](double x) {
                return eigenfunction(BoundaryCondition::Dirichlet, k, x).real() *
                       s.value(u, x);
            },
            -1.0, 1.0, QuadratureRule{20}, std::vector<double>(
                s.mesh.interior_interfaces()), 8);
        CHECK(moments[flat_index(BoundaryCondition::Dirichlet, k, 6)] ==
              doctest::Approx(direct).epsilon(1e-9).scale(1.0));
    }
}
