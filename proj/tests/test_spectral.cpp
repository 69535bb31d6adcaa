#include <cmath>
#include <complex>

#include <doctest.h>

#include "nlwave/spectral.hpp"

using namespace nlwave;

namespace {
const double kPi = std::acos(-1.0);
const double kSqrt2 = std::sqrt(2.0);

double box_data(double x) { return std::abs(x) <= 0.25 ? 1.5 : 0.0; }
const std::vector<double> kBoxDataBreaks = {-0.25, 0.25};
} // namespace

TEST_CASE("scalar solution kernels") {
    CHECK(cos_sqrt(1.3, 4.0) == doctest::Approx(std::cos(2.6)).epsilon(1e-14));
    CHECK(sinc_sqrt(1.3, 4.0) == doctest::Approx(std::sin(2.6) / 2.0).epsilon(1e-14));
    CHECK(sinc_sqrt(0.7, 0.0) == doctest::Approx(0.7).epsilon(1e-15));
    // small-argument branch agrees with the direct formula across the switch
    const double t = 2.0;
    for (double phi : {1e-8, 1e-6, 1e-4, 1e-2}) {
        const double direct = std::sin(t * std::sqrt(phi)) / std::sqrt(phi);
        CHECK(sinc_sqrt(t, phi) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("form names round-trip and map to their bc") {
    for (OperatorForm f :
         {OperatorForm::CanonicalPeriodic, OperatorForm::CanonicalAntiperiodic,
          OperatorForm::SimpleNeumann, OperatorForm::SimpleDirichlet,
          OperatorForm::CanonicalNeumann, OperatorForm::CanonicalDirichlet})
        CHECK(form_from_string(to_string(f)) == f);
    CHECK(form_from_string("neumann") == OperatorForm::SimpleNeumann);
    CHECK(form_from_string("dirichlet") == OperatorForm::SimpleDirichlet);
    CHECK(bc_of(OperatorForm::CanonicalAntiperiodic) == BoundaryCondition::Antiperiodic);
    CHECK(default_form(BoundaryCondition::Neumann) == OperatorForm::SimpleNeumann);
    CHECK_THROWS_AS(form_from_string("weird"), std::invalid_argument);
}

TEST_CASE("regulating function of the unit box, canonical periodic") {
    NonlocalOperator op = build_operator(unit_box(), BoundaryCondition::Periodic,
                                         OperatorForm::CanonicalPeriodic, 16);
    CHECK(op.regulating.constant == doctest::Approx(1.0 / kSqrt2).epsilon(1e-13));
    // phi(0) = c - <e_0|C> = 0; phi(k^2) = c - sqrt(2) sin(pi k/2)/(pi k).
    CHECK(op.phi_of_mode(0) == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(op.phi_of_mode(1) ==
          doctest::Approx(1.0 / kSqrt2 - kSqrt2 / kPi).epsilon(1e-12));
    CHECK(op.phi_of_mode(2) == doctest::Approx(1.0 / kSqrt2).epsilon(1e-12));
    CHECK(op.phi_of_mode(-1) == doctest::Approx(op.phi_of_mode(1)).epsilon(1e-13));
}

TEST_CASE("regulating function of the unit box, simple forms") {
    // phi(lambda): 1 at 0, 2 - 2 sqrt(2)/pi at 1, 2 - 2/pi at 4,
    // 2 - 2 sqrt(2)/(3 pi) at 9. Same values for both simple families.
    NonlocalOperator n = build_operator(unit_box(), BoundaryCondition::Neumann,
                                        OperatorForm::SimpleNeumann, 64);
    CHECK(n.phi_of_mode(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(n.phi_of_mode(1) == doctest::Approx(2.0 - 2.0 * kSqrt2 / kPi).epsilon(1e-12));
    CHECK(n.phi_of_mode(2) == doctest::Approx(2.0 - 2.0 / kPi).epsilon(1e-12));
    CHECK(n.phi_of_mode(3) == doctest::Approx(2.0 - 2.0 * kSqrt2 / (3.0 * kPi)).epsilon(1e-12));

    NonlocalOperator d = build_operator(unit_box(), BoundaryCondition::Dirichlet,
                                        OperatorForm::SimpleDirichlet, 64);
    CHECK(d.phi_of_mode(1) == doctest::Approx(n.phi_of_mode(1)).epsilon(1e-13));
    CHECK(d.phi_of_mode(2) == doctest::Approx(n.phi_of_mode(2)).epsilon(1e-13));

    // identity multiple of the simple forms: 2 sqrt(2) c = 2.
    CHECK(n.identity_multiple() == doctest::Approx(2.0).epsilon(5e-3));
    CHECK(d.identity_multiple() == doctest::Approx(2.0).epsilon(5e-3));
}

TEST_CASE("regulating function of the unit box, canonical Neumann and Dirichlet") {
    NonlocalOperator n = build_operator(unit_box(), BoundaryCondition::Neumann,
                                        OperatorForm::CanonicalNeumann, 64);
    CHECK(n.regulating.constant == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(n.phi_of_mode(0) == doctest::Approx(1.0 - 1.0 / kSqrt2).epsilon(1e-12));
    CHECK(n.identity_multiple() == doctest::Approx(1.0).epsilon(5e-3));

    NonlocalOperator d = build_operator(unit_box(), BoundaryCondition::Dirichlet,
                                        OperatorForm::CanonicalDirichlet, 64);
    CHECK(d.phi_of_mode(1) == doctest::Approx(1.0 - 2.0 * kSqrt2 / kPi).epsilon(1e-12));
    CHECK(d.identity_multiple() == doctest::Approx(1.0).epsilon(5e-3));
}

TEST_CASE("operator construction rejects incompatible pairs") {
    CHECK_THROWS_AS(build_operator(unit_box(), BoundaryCondition::Periodic,
                                   OperatorForm::SimpleNeumann, 8),
                    std::domain_error);
    Micromodulus skew =
        make_micromodulus([](double x) { return x > 0.0 ? 1.0 : 0.5; }, {0.0}, "skew");
    CHECK_THROWS_AS(build_operator(skew, BoundaryCondition::Neumann,
                                   OperatorForm::SimpleNeumann, 8),
                    std::domain_error);
    // a skew kernel has complex periodic eigencoefficients, so the canonical
    // periodic form rejects it as well
    CHECK_THROWS_AS(build_operator(skew, BoundaryCondition::Periodic,
                                   OperatorForm::CanonicalPeriodic, 8),
                    std::domain_error);
}

TEST_CASE("positivity of the regulating function, all forms, unit box") {
    for (OperatorForm f :
         {OperatorForm::CanonicalPeriodic, OperatorForm::CanonicalAntiperiodic,
          OperatorForm::SimpleNeumann, OperatorForm::SimpleDirichlet,
          OperatorForm::CanonicalNeumann, OperatorForm::CanonicalDirichlet}) {
        NonlocalOperator op = build_operator(unit_box(), f, 128);
        CHECK(op.regulating.phi.minCoeff() >= -1e-12);
    }
}

TEST_CASE("coefficient-space action is the diagonal functional calculus") {
    NonlocalOperator op = build_operator(unit_box(), BoundaryCondition::Antiperiodic,
                                         OperatorForm::CanonicalAntiperiodic, 24);
    CoefficientVector u;
    u.bc = BoundaryCondition::Antiperiodic;
    u.cutoff = 24;
    u.values = Eigen::VectorXcd::Zero(coefficient_count(u.bc, 24));
    u.values[flat_index(u.bc, 3, 24)] = {2.0, -1.0};
    CoefficientVector v = op.apply(u);
    CHECK(v.coeff(3).real() == doctest::Approx(2.0 * op.phi_of_mode(3)).epsilon(1e-14));
    CHECK(v.coeff(3).imag() == doctest::Approx(-op.phi_of_mode(3)).epsilon(1e-14));
    CHECK(std::abs(v.coeff(2)) == 0.0);

    // apply_function generalizes: g = squaring matches apply twice.
    CoefficientVector w2 = op.apply(op.apply(u));
    CoefficientVector g2 = op.apply_function([](double p) { return p * p; }, u);
    CHECK(std::abs(w2.coeff(3) - g2.coeff(3)) < 1e-14);
}

TEST_CASE("integral route applies the operator to eigenfunctions diagonally") {
    // The substantive dual-route check: convolve in physical space, compare
    // with phi_k e_k. Real eigenfunctions for N/D; cosine pair for periodic.
    NonlocalOperator n = build_operator(unit_box(), BoundaryCondition::Neumann,
                                        OperatorForm::SimpleNeumann, 32);
    for (int k : {0, 1, 2, 5}) {
        auto ek = [&](double y) { return eigenfunction(BoundaryCondition::Neumann, k, y).real(); };
        for (double x : {-0.61, 0.0, 0.37, 0.83})
            CHECK(n.apply_integral(ek, x) ==
                  doctest::Approx(n.phi_of_mode(k) * ek(x)).epsilon(1e-9).scale(1.0));
    }

    NonlocalOperator d = build_operator(unit_box(), BoundaryCondition::Dirichlet,
                                        OperatorForm::SimpleDirichlet, 32);
    for (int k : {1, 2, 4}) {
        auto ek = [&](double y) {
            return eigenfunction(BoundaryCondition::Dirichlet, k, y).real();
        };
        for (double x : {-0.61, 0.37, 0.83})
            CHECK(d.apply_integral(ek, x) ==
                  doctest::Approx(d.phi_of_mode(k) * ek(x)).epsilon(1e-9).scale(1.0));
    }

    NonlocalOperator p = build_operator(unit_box(), BoundaryCondition::Periodic,
                                        OperatorForm::CanonicalPeriodic, 32);
    for (int k : {0, 1, 3}) {
        auto ck = [&](double y) { return std::cos(kPi * k * y) / (k == 0 ? kSqrt2 : 1.0); };
        for (double x : {-0.52, 0.11, 0.74})
            CHECK(p.apply_integral(ck, x) ==
                  doctest::Approx(p.phi_of_mode(k) * ck(x)).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("canonical Neumann integral route needs its boundary compensation") {
    // Acting on e_0 (a constant): the four-term convolution alone misses
    // phi(0) e_0 by the k_n <e_0|u> term, which is order 0.2 for the box.
    NonlocalOperator op = build_operator(unit_box(), BoundaryCondition::Neumann,
                                         OperatorForm::CanonicalNeumann, 32);
    auto e0 = [](double) { return 1.0 / kSqrt2; };
    for (double x : {-0.7, 0.05, 0.44}) {
        CHECK(op.apply_integral(e0, x) ==
              doctest::Approx(op.phi_of_mode(0) / kSqrt2).epsilon(1e-9).scale(1.0));
    }
    for (int k : {1, 2, 3}) {
        auto ek = [&](double y) { return eigenfunction(BoundaryCondition::Neumann, k, y).real(); };
        for (double x : {-0.7, 0.05, 0.44})
            CHECK(op.apply_integral(ek, x) ==
                  doctest::Approx(op.phi_of_mode(k) * ek(x)).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("canonical Dirichlet diagonal action via the alternating projection") {
    NonlocalOperator op = build_operator(unit_box(), BoundaryCondition::Dirichlet,
                                         OperatorForm::CanonicalDirichlet, 128);
    for (int k : {1, 2, 3, 6}) {
        auto ek = [&](double y) {
            return eigenfunction(BoundaryCondition::Dirichlet, k, y).real();
        };
        for (double x : {-0.58, 0.21, 0.77})
            CHECK(op.apply_integral(ek, x) ==
                  doctest::Approx(op.phi_of_mode(k) * ek(x)).epsilon(1e-7).scale(1.0));
    }
}

TEST_CASE("abstract convolution matches the integral convolution mode by mode") {
    // Both routes to (C*u): componentwise coefficient product vs the
    // extension integral, compared on the first coefficients.
    const int M = 64;
    auto u = [](double x) { return x * x - 0.4; };
    for (auto [bc, form] :
         {std::pair{BoundaryCondition::Periodic, OperatorForm::CanonicalPeriodic},
          std::pair{BoundaryCondition::Antiperiodic, OperatorForm::CanonicalAntiperiodic}}) {
        CoefficientVector cc = project(unit_box().evaluator, bc, M, {-0.5, 0.5});
        CoefficientVector uc = project(u, bc, M);
        CoefficientVector prod = abstract_convolve(cc, uc);
        NonlocalOperator op = build_operator(unit_box(), bc, form, M);
        const Micromodulus kb = unit_box();
        auto conv = [&](double x) { return integral_convolve(kb, u, bc, form, x); };
        CoefficientVector ic = project(conv, bc, 8, op.pointwise_result_breakpoints({}));
        for (int k = -8; k <= 8; ++k)
            CHECK(std::abs(prod.coeff(k) - ic.coeff(k)) < 1e-9);
    }
}

TEST_CASE("homogeneous series solution: structure, traces, energy") {
    NonlocalOperator op = build_operator(unit_box(), BoundaryCondition::Periodic,
                                         OperatorForm::CanonicalPeriodic, 64);
    CoefficientVector u0 = project(box_data, BoundaryCondition::Periodic, 64, kBoxDataBreaks);
    CoefficientVector v0 = project([](double) { return 0.0; }, BoundaryCondition::Periodic, 64);
    SpectralSolution sol = solve_homogeneous(op, u0, v0);

    // t = 0 returns the data projection.
    CHECK(sol.value(0.0, 0.0) == doctest::Approx(synthesize_real(u0, 0.0)).epsilon(1e-12));

    // each coefficient evolves as cos(t sqrt(phi_k)) u0_k
    const double t = 1.37;
    CoefficientVector ct = sol.coefficients(t);
    for (int k : {0, 1, 2, 5}) {
        const std::complex<double> want =
            u0.coeff(k) * std::cos(t * std::sqrt(op.phi_of_mode(k)));
        CHECK(std::abs(ct.coeff(k) - want) < 1e-13);
    }

    // energy is conserved
    const double e0 = sol.energy(0.0);
    for (double s : {0.5, 2.0, 9.0, 17.5})
        CHECK(sol.energy(s) == doctest::Approx(e0).epsilon(1e-12));

    // periodic boundary trace identity of the truncated series
    for (double s : {0.4, 3.3})
        CHECK(std::abs(sol.value(-1.0, s) - sol.value(1.0, s)) < 1e-12);

    // values() batches value()
    Eigen::VectorXd xs(3);
    xs << -0.41, 0.02, 0.66;
    Eigen::VectorXd vs = sol.values(xs, t);
    for (int i = 0; i < 3; ++i)
        CHECK(vs[i] == doctest::Approx(sol.value(xs[i], t)).epsilon(1e-13));
}

TEST_CASE("velocity data activates the sinc branch") {
    NonlocalOperator op = build_operator(unit_box(), BoundaryCondition::Dirichlet,
                                         OperatorForm::SimpleDirichlet, 32);
    CoefficientVector u0 = project([](double) { return 0.0; }, BoundaryCondition::Dirichlet, 32);
    CoefficientVector v0 =
        project([](double x) { return std::sin(kPi * x / 2.0 + kPi / 2.0); },
                BoundaryCondition::Dirichlet, 32);
    SpectralSolution sol = solve_homogeneous(op, u0, v0);
    const double t = 0.9;
    const double phi = op.phi_of_mode(1);
    CHECK(sol.coefficients(t).coeff(1).real() ==
          doctest::Approx(std::sin(t * std::sqrt(phi)) / std::sqrt(phi)).epsilon(1e-12));
}

TEST_CASE("forced solution reproduces the quadratic-in-time manufactured mode") {
    // u'' + phi u = 2 + phi t^2 has the exact solution t^2 from rest.
    NonlocalOperator op = build_operator(unit_box(), BoundaryCondition::Neumann,
                                         OperatorForm::SimpleNeumann, 8);
    auto b = [&](double tau) {
        CoefficientVector r;
        r.bc = BoundaryCondition::Neumann;
        r.cutoff = 8;
        r.values = Eigen::VectorXcd::Zero(coefficient_count(r.bc, 8));
        for (int k : {0, 2, 3})
            r.values[flat_index(r.bc, k, 8)] = 2.0 + op.phi_of_mode(k) * tau * tau;
        return r;
    };
    CoefficientVector u2 = solve_inhomogeneous(op, b, 2.0);
    for (int k : {0, 2, 3})
        CHECK(u2.coeff(k).real() == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(std::abs(u2.coeff(1)) < 1e-9);
}

TEST_CASE("solution-operator perturbation bounds") {
    DecayCheck d = decay_bound_check(1.0, 0.5, 2.0);
    CHECK(d.actual_cos ==
          doctest::Approx(std::abs(std::cos(2.0 * std::sqrt(0.5)) - std::cos(2.0)))
              .epsilon(1e-12));
    CHECK(d.actual_cos == doctest::Approx(0.5720905).epsilon(1e-6));
    CHECK(d.actual_cos <= d.bound_cos);
    CHECK(d.actual_sinc <= d.bound_sinc);
    CHECK(d.bound_cos == doctest::Approx((4.0 / 2.0 + 2.0) * 0.5).epsilon(1e-12));

    CHECK_THROWS_AS(decay_bound_check(-1.0, 0.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(decay_bound_check(0.5, 0.9, 1.0), std::domain_error); // lambda > c
    CHECK_THROWS_AS(decay_bound_check(2.0, 1.5, 1.0), std::domain_error); // lambda > 1
}

TEST_CASE("evolved jump ratio follows cos(t sqrt(c_id))") {
    NonlocalOperator op = build_operator(unit_box(), BoundaryCondition::Periodic,
                                         OperatorForm::CanonicalPeriodic, 256);
    const double cid = op.identity_multiple();
    CHECK(cid == doctest::Approx(1.0 / kSqrt2).epsilon(2e-3));
    for (double t : {0.5, 1.0}) {
        const double ratio = jump_scale(op, box_data, 0.25, t, kBoxDataBreaks);
        CHECK(std::abs(ratio - std::cos(t * std::sqrt(cid))) < 1e-2);
    }
    CHECK_THROWS_AS(jump_scale(op, [](double) { return 1.0; }, 0.25, 1.0),
                    std::domain_error);
}

TEST_CASE("alternating-mode projection: both routes agree at finite rank") {
    for (double x : {-0.63, 0.12, 0.57}) {
        ProjectionCheck pc = dirichlet_projection_check(box_data, 8, x, kBoxDataBreaks);
        CHECK(pc.coefficient_route == doctest::Approx(pc.kernel_route).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("canonical Dirichlet integral route converges to coefficient space") {
    const Micromodulus c = unit_box();
    auto u = [](double x) { return (1.0 - x * x) * std::exp(0.3 * x); };
    const int M = 256;
    CoefficientVector cc = project(c.evaluator, BoundaryCondition::Dirichlet, M, {-0.5, 0.5});
    CoefficientVector uc = project(u, BoundaryCondition::Dirichlet, M);
    CoefficientVector prod = abstract_convolve(cc, uc);
    const double x = 0.31;
    const double want = synthesize_real(prod, x);
    const double coarse = std::abs(dirichlet_convolve_integral_route(c, u, 4, x) - want);
    const double fine = std::abs(dirichlet_convolve_integral_route(c, u, 32, x) - want);
    CHECK(fine < coarse);
    CHECK(fine < 1e-6);
}

TEST_CASE("pointwise result breakpoints include the operand's own kinks") {
    NonlocalOperator op = build_operator(unit_box(), BoundaryCondition::Periodic,
                                         OperatorForm::CanonicalPeriodic, 16);
    const std::vector<double> bps = op.pointwise_result_breakpoints({-0.25, 0.25});
    auto contains = [&](double v) {
        for (double b : bps)
            if (std::abs(b - v) < 1e-12)
                return true;
        return false;
    };
    CHECK(contains(-0.25));
    CHECK(contains(0.25));
    for (double b : bps) {
        CHECK(b > -1.0 - 1e-12);
        CHECK(b < 1.0 + 1e-12);
    }
}
