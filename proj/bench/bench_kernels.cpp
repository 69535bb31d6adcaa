// Timing comparison of the OpenMP-parallel kernels against the serial
// reference implementations that back them in the tests. Reports best-of-3
// wall times, the speedup, and the max elementwise difference (which should
// sit at rounding level; the pairs compute the same numbers).
//
//   ./bench_kernels [n_elements] [degree] [cutoff]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "nlwave/fem.hpp"
#include "nlwave/harness.hpp"

#ifdef NLWAVE_HAS_OPENMP
#include <omp.h>
#endif

using namespace nlwave;

namespace {

double time_best_of(int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        fn();
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

void row(const char* name, double serial, double parallel, double diff) {
    std::printf("%-28s %10.4f s %10.4f s %7.2fx   max diff %.2e\n", name, serial, parallel,
                serial / parallel, diff);
}

} // namespace

int main(int argc, char** argv) {
    const int n_elements = argc > 1 ? std::atoi(argv[1]) : 64;
    const int degree = argc > 2 ? std::atoi(argv[2]) : 2;
    const int cutoff = argc > 3 ? std::atoi(argv[3]) : 512;

#ifdef NLWAVE_HAS_OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; the parallel paths run serially\n");
#endif
    std::printf("mesh N=%d, degree %d, spectral cutoff M=%d\n\n", n_elements, degree, cutoff);

    auto kern = unit_box();
    auto space = fem::make_space(fem::uniform_mesh(n_elements), degree);
    const int reps = 3;

    {
        auto ext = extend(kern, ExtensionMode::Periodic2);
        Eigen::MatrixXd mp, ms;
        double tp = time_best_of(reps, [&] { mp = fem::convolution_matrix(space, ext, +1); });
        double ts = time_best_of(reps, [&] { ms = fem::convolution_matrix_serial(space, ext, +1); });
        row("convolution matrix", ts, tp, (mp - ms).cwiseAbs().maxCoeff());
    }

    {
        fem::DenseOperator ap, as;
        auto bc = BoundaryCondition::Dirichlet;
        auto form = OperatorForm::SimpleDirichlet;
        double tp = time_best_of(reps, [&] { ap = fem::assemble_stiffness(space, kern, bc, form); });
        double ts = time_best_of(
            reps, [&] { as = fem::assemble_stiffness_serial(space, kern, bc, form); });
        row("stiffness (parity split)", ts, tp, (ap.matrix - as.matrix).cwiseAbs().maxCoeff());
    }

    {
        auto bump = harness::initial_data("bump");
        CoefficientVector cp, cs;
        double tp = time_best_of(
            reps, [&] { cp = project(bump.f, BoundaryCondition::Periodic, cutoff, bump.breakpoints); });
        double ts = time_best_of(reps, [&] {
            cs = project_serial(bump.f, BoundaryCondition::Periodic, cutoff, bump.breakpoints);
        });
        row("projection", ts, tp, (cp.values - cs.values).cwiseAbs().maxCoeff());

        Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(4000, -1.0, 1.0);
        Eigen::VectorXd vp, vs;
        double tp2 = time_best_of(reps, [&] { vp = synthesize_many(cp, xs); });
        double ts2 = time_best_of(reps, [&] { vs = synthesize_many_serial(cp, xs); });
        row("synthesis", ts2, tp2, (vp - vs).cwiseAbs().maxCoeff());
    }

    return 0;
}
