#include <cmath>
#include <complex>

#include <doctest.h>

#include "nlwave/basis.hpp"

using namespace nlwave;

namespace {

const double kPi = std::acos(-1.0);

std::complex<double> inner(BoundaryCondition bc, int j, int k) {
    // <e_j | e_k> by direct quadrature, resolved against the mode numbers.
    QuadratureRule rule;
    rule.order = 24;
    const int pieces = 4 + std::max(std::abs(j), std::abs(k));
    auto re = [&](double x) {
        return (std::conj(eigenfunction(bc, j, x)) * eigenfunction(bc, k, x)).real();
    };
    auto im = [&](double x) {
        return (std::conj(eigenfunction(bc, j, x)) * eigenfunction(bc, k, x)).imag();
    };
    return {integrate(re, -1.0, 1.0, rule, {}, pieces),
            integrate(im, -1.0, 1.0, rule, {}, pieces)};
}

} // namespace

TEST_CASE("eigenvalues per family") {
    CHECK(eigenvalue(BoundaryCondition::Periodic, -3) == 9.0);
    CHECK(eigenvalue(BoundaryCondition::Antiperiodic, 2) == 6.25);
    CHECK(eigenvalue(BoundaryCondition::Antiperiodic, -3) == 6.25);
    CHECK(eigenvalue(BoundaryCondition::Neumann, 0) == 0.0);
    CHECK(eigenvalue(BoundaryCondition::Neumann, 4) == 16.0);
    CHECK(eigenvalue(BoundaryCondition::Dirichlet, 1) == 1.0);
    CHECK_THROWS_AS(eigenvalue(BoundaryCondition::Dirichlet, 0), std::domain_error);
    CHECK_THROWS_AS(eigenvalue(BoundaryCondition::Neumann, -1), std::domain_error);
}

TEST_CASE("each family is orthonormal") {
    for (BoundaryCondition bc :
         {BoundaryCondition::Periodic, BoundaryCondition::Antiperiodic,
          BoundaryCondition::Neumann, BoundaryCondition::Dirichlet}) {
        const int lo = bc == BoundaryCondition::Dirichlet       ? 1
                       : bc == BoundaryCondition::Neumann        ? 0
                                                                 : -2;
        for (int j = lo; j <= lo + 3; ++j)
            for (int k = lo; k <= lo + 3; ++k) {
                const std::complex<double> ip = inner(bc, j, k);
                CHECK(ip.real() == doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-12));
                CHECK(std::abs(ip.imag()) < 1e-12);
            }
    }
}

TEST_CASE("boundary behavior of each family") {
    for (int k : {0, 1, 5}) {
        // periodic: equal traces; antiperiodic: opposite traces.
        auto ep = [&](double x) { return eigenfunction(BoundaryCondition::Periodic, k, x); };
        auto ea = [&](double x) { return eigenfunction(BoundaryCondition::Antiperiodic, k, x); };
        CHECK(std::abs(ep(-1.0) - ep(1.0)) < 1e-14);
        CHECK(std::abs(ea(-1.0) + ea(1.0)) < 1e-14);
    }
    for (int k : {1, 2, 7}) {
        CHECK(std::abs(eigenfunction(BoundaryCondition::Dirichlet, k, -1.0)) < 1e-13);
        CHECK(std::abs(eigenfunction(BoundaryCondition::Dirichlet, k, 1.0)) < 1e-13);
        CHECK(std::abs(eigenfunction_derivative(BoundaryCondition::Neumann, k, -1.0)) < 1e-13);
        CHECK(std::abs(eigenfunction_derivative(BoundaryCondition::Neumann, k, 1.0)) < 1e-13);
    }
}

TEST_CASE("derivatives match central differences") {
    const double h = 1e-6;
    for (BoundaryCondition bc :
         {BoundaryCondition::Periodic, BoundaryCondition::Antiperiodic,
          BoundaryCondition::Neumann, BoundaryCondition::Dirichlet}) {
        const int k = bc == BoundaryCondition::Dirichlet ? 3 : 2;
        for (double x : {-0.6, 0.13, 0.71}) {
            const std::complex<double> fd =
                (eigenfunction(bc, k, x + h) - eigenfunction(bc, k, x - h)) / (2.0 * h);
            CHECK(std::abs(eigenfunction_derivative(bc, k, x) - fd) < 1e-7);
        }
    }
}

TEST_CASE("flat layout round-trips and counts") {
    CHECK(coefficient_count(BoundaryCondition::Periodic, 3) == 7);
    CHECK(coefficient_count(BoundaryCondition::Antiperiodic, 3) == 7);
    CHECK(coefficient_count(BoundaryCondition::Neumann, 3) == 4);
    CHECK(coefficient_count(BoundaryCondition::Dirichlet, 3) == 3);
    for (BoundaryCondition bc :
         {BoundaryCondition::Periodic, BoundaryCondition::Antiperiodic,
          BoundaryCondition::Neumann, BoundaryCondition::Dirichlet}) {
        const int M = 5;
        for (int i = 0; i < coefficient_count(bc, M); ++i)
            CHECK(flat_index(bc, mode_at(bc, i, M), M) == i);
    }
    CHECK_THROWS_AS(flat_index(BoundaryCondition::Periodic, 6, 5), std::domain_error);
}

TEST_CASE("projection of pure modes is a delta") {
    // cos(pi x) = (e_1 + e_{-1}) / sqrt(2) in the periodic family.
    auto f = [](double x) { return std::cos(kPi * x); };
    CoefficientVector c = project(f, BoundaryCondition::Periodic, 6);
    CHECK(c.coeff(1).real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(c.coeff(-1).real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(c.coeff(2)) < 1e-12);
    CHECK(std::abs(c.coeff(0)) < 1e-12);

    for (double x : {-0.9, -0.2, 0.4, 0.77})
        CHECK(synthesize_real(c, x) == doctest::Approx(f(x)).epsilon(1e-12));
}

TEST_CASE("projection handles jump data when told where the jump is") {
    // Indicator of [-1/4, 1/4] scaled by 3/2 against the periodic family:
    // <e_k|f> = (3/sqrt(2)) sin(pi k / 4) / (pi k).
    auto f = [](double x) { return std::abs(x) <= 0.25 ? 1.5 : 0.0; };
    CoefficientVector c = project(f, BoundaryCondition::Periodic, 16, {-0.25, 0.25});
    for (int k : {1, 2, 3, 5, 8}) {
        const double want = 3.0 / std::sqrt(2.0) * std::sin(kPi * k / 4.0) / (kPi * k);
        CHECK(c.coeff(k).real() == doctest::Approx(want).epsilon(1e-12));
        CHECK(std::abs(c.coeff(k).imag()) < 1e-12);
    }
    CHECK(c.coeff(0).real() == doctest::Approx(0.75 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("kernel-style projections against closed forms") {
    // Unit-width box (1 on [-1/2,1/2]): periodic <e_k|C> = sqrt(2) sin(pi k/2)/(pi k),
    // antiperiodic <e_k|C> = sqrt(2) sin(pi(k+1/2)/2)/(pi(k+1/2)),
    // neumann <e_2|C> = -2/pi.
    auto box = [](double x) { return std::abs(x) <= 0.5 ? 1.0 : 0.0; };
    const std::vector<double> bps = {-0.5, 0.5};

    CoefficientVector cp = project(box, BoundaryCondition::Periodic, 12, bps);
    CHECK(cp.coeff(0).real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    for (int k : {1, 2, 3, 7})
        CHECK(cp.coeff(k).real() ==
              doctest::Approx(std::sqrt(2.0) * std::sin(kPi * k / 2.0) / (kPi * k))
                  .epsilon(1e-12));

    CoefficientVector ca = project(box, BoundaryCondition::Antiperiodic, 12, bps);
    CHECK(ca.coeff(0).real() == doctest::Approx(2.0 / kPi).epsilon(1e-12));
    for (int k : {1, 2, 5}) {
        const double kk = k + 0.5;
        CHECK(ca.coeff(k).real() ==
              doctest::Approx(std::sqrt(2.0) * std::sin(kPi * kk / 2.0) / (kPi * kk))
                  .epsilon(1e-12));
    }

    CoefficientVector cn = project(box, BoundaryCondition::Neumann, 12, bps);
    CHECK(cn.coeff(2).real() == doctest::Approx(-2.0 / kPi).epsilon(1e-12));
    // Odd cosine modes of an even function vanish.
    CHECK(std::abs(cn.coeff(1)) < 1e-13);
    CHECK(std::abs(cn.coeff(3)) < 1e-13);

    // Dirichlet modes of 1 + cos(pi x): odd k carry -16/(pi k (k^2-4)).
    auto lifted = [](double x) { return 1.0 + std::cos(kPi * x); };
    CoefficientVector cd = project(lifted, BoundaryCondition::Dirichlet, 12);
    for (int k : {1, 3, 5})
        CHECK(cd.coeff(k).real() ==
              doctest::Approx(-16.0 / (kPi * k * (k * k - 4.0))).epsilon(1e-12));
    CHECK(std::abs(cd.coeff(2)) < 1e-13);
}

TEST_CASE("parallel and serial projection agree to the bit") {
    auto f = [](double x) { return std::exp(x) * std::sin(2.0 * x); };
    CoefficientVector par = project(f, BoundaryCondition::Antiperiodic, 24);
    CoefficientVector ser = project_serial(f, BoundaryCondition::Antiperiodic, 24);
    REQUIRE(par.values.size() == ser.values.size());
    for (Eigen::Index i = 0; i < par.values.size(); ++i)
        CHECK(std::abs(par.values[i] - ser.values[i]) == 0.0);
}

TEST_CASE("synthesize_many matches pointwise synthesis") {
    auto f = [](double x) { return x * x * x - 0.3 * x; };
    CoefficientVector c = project(f, BoundaryCondition::Dirichlet, 32);
    Eigen::VectorXd xs(5);
    xs << -0.95, -0.5, 0.0, 0.31, 0.88;
    const Eigen::VectorXd many = synthesize_many(c, xs);
    const Eigen::VectorXd many_serial = synthesize_many_serial(c, xs);
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
        CHECK(many[i] == doctest::Approx(synthesize_real(c, xs[i])).epsilon(1e-14));
        CHECK(many[i] == many_serial[i]);
    }
}

TEST_CASE("smooth compatible data converges spectrally in the basis") {
    // x^4 - 1 respects the antiperiodic traces; truncation error should drop
    // fast with M.
    auto f = [](double x) { return x * x * x * x - 1.0; };
    auto linf_err = [&](int M) {
        CoefficientVector c = project(f, BoundaryCondition::Antiperiodic, M);
        double worst = 0.0;
        for (double x = -0.9; x <= 0.95; x += 0.1)
            worst = std::max(worst, std::abs(synthesize_real(c, x) - f(x)));
        return worst;
    };
    const double e16 = linf_err(16);
    const double e64 = linf_err(64);
    CHECK(e64 < e16);
    CHECK(e64 < 2e-5);
}
