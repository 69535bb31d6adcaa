#include "nlwave/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nlwave::harness {

namespace {

constexpr double kQuarter = 0.25;

// C^2 quintic bump: f(s) = 1 - 10 s^3 + 15 s^4 - 6 s^5 on s in [0,1],
// applied with s = 4|x|. f(0) = 1, f(1) = f'(1) = f''(1) = 0 and
// f'(0) = f''(0) = 0, so the extension by zero is C^2 on the line.
double bump_profile(double x) {
    const double s = 4.0 * std::abs(x);
    if (s >= 1.0)
        return 0.0;
    return 1.0 + s * s * s * (-10.0 + s * (15.0 - 6.0 * s));
}

double box_profile(double x) { return std::abs(x) <= kQuarter ? 1.5 : 0.0; }

} // namespace

InitialData initial_data(const std::string& name) {
    InitialData d;
    d.name = name;
    if (name == "zero") {
        d.f = [](double) { return 0.0; };
        d.symmetric = true;
    } else if (name == "box") {
        d.f = box_profile;
        d.breakpoints = {-kQuarter, kQuarter};
        d.jump_locations = {-kQuarter, kQuarter};
        d.symmetric = true;
    } else if (name == "bump") {
        d.f = bump_profile;
        // The odd-order derivatives of |x| kink at 0; the support edges are
        // only C^2, so quadrature panels should break at all three points.
        d.breakpoints = {-kQuarter, 0.0, kQuarter};
        d.symmetric = true;
    } else {
        throw std::invalid_argument("unknown initial data '" + name +
                                    "' (expected zero, box, or bump)");
    }
    return d;
}

std::vector<std::string> initial_data_names() { return {"zero", "box", "bump"}; }

ManufacturedCase custom_case(BoundaryCondition bc, OperatorForm form,
                             const Micromodulus& kernel, std::function<double(double)> profile,
                             std::vector<double> profile_breakpoints, std::string name) {
    ManufacturedCase c;
    c.bc = bc;
    c.form = form;
    c.kernel = kernel;
    c.name = std::move(name);
    c.profile = std::move(profile);
    c.profile_breakpoints = std::move(profile_breakpoints);

    // The integral route needs no eigencoefficients except for the canonical
    // Dirichlet form, which evaluates in coefficient space; give that one a
    // deep truncation so the source stays well below discretization error.
    const int cutoff = form == OperatorForm::CanonicalDirichlet ? 512 : 64;
    auto op = std::make_shared<NonlocalOperator>(build_operator(kernel, bc, form, cutoff));
    auto x_profile = c.profile;
    auto x_breaks = c.profile_breakpoints;
    c.source_profile = [op, x_profile, x_breaks](double x) {
        return op->apply_integral(x_profile, x, x_breaks);
    };
    c.source_breakpoints = op->pointwise_result_breakpoints(c.profile_breakpoints);
    return c;
}

ManufacturedCase manufactured_case(BoundaryCondition bc, const Micromodulus& kernel) {
    const double pi = std::acos(-1.0);
    switch (bc) {
    case BoundaryCondition::Periodic:
        return custom_case(
            bc, OperatorForm::CanonicalPeriodic, kernel,
            [pi](double x) { return std::sin(pi * x) + std::cos(pi * x); }, {},
            "sin(pi x)+cos(pi x)");
    case BoundaryCondition::Antiperiodic:
        return custom_case(
            bc, OperatorForm::CanonicalAntiperiodic, kernel,
            [](double x) { return x * x * x * x - 1.0; }, {}, "x^4-1");
    case BoundaryCondition::Neumann:
        return custom_case(
            bc, OperatorForm::SimpleNeumann, kernel,
            [](double x) {
                const double w = x * x - 1.0;
                return w * w - 8.0 / 15.0;
            },
            {}, "(x^2-1)^2-8/15");
    case BoundaryCondition::Dirichlet:
        return custom_case(
            bc, OperatorForm::SimpleDirichlet, kernel,
            [pi](double x) { return 1.0 + std::sin(pi * x) + std::cos(pi * x); }, {},
            "1+sin(pi x)+cos(pi x)");
    }
    throw std::invalid_argument("manufactured_case: unknown boundary condition");
}

ResidualCheck verify_case(const ManufacturedCase& c, int samples, unsigned seed, int cutoff) {
    if (samples < 1)
        throw std::invalid_argument("verify_case: samples must be positive");

    NonlocalOperator op = build_operator(c.kernel, c.bc, c.form, cutoff);
    CoefficientVector xc = project(c.profile, c.bc, cutoff, c.profile_breakpoints);
    CoefficientVector wc = op.apply(xc);

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ux(-1.0, 1.0);
    std::uniform_real_distribution<double> ut(0.0, 20.0);

    ResidualCheck r;
    const double dt = 0.01; // centered second difference is exact on t^2
    for (int i = 0; i < samples; ++i) {
        const double x = ux(rng);
        const double t = ut(rng);

        const double x_here = synthesize_real(xc, x);
        const double w_here = synthesize_real(wc, x);
        auto u_here = [&](double s) { return s * s * x_here; };
        const double utt = (u_here(t + dt) - 2.0 * u_here(t) + u_here(t - dt)) / (dt * dt);
        const double b_here = 2.0 * x_here + t * t * w_here;
        const double residual = std::abs(utt + t * t * w_here - b_here);
        r.max_residual = std::max(r.max_residual, residual);

        const double gap = std::abs(c.source_profile(x) - w_here);
        r.max_route_gap = std::max(r.max_route_gap, gap);
    }
    r.pass = r.max_residual < 1e-6 && r.max_route_gap < 1e-4;
    return r;
}

namespace {

double profile_l2_norm(const ManufacturedCase& c) {
    QuadratureRule rule;
    rule.order = 32;
    auto f2 = [&](double x) {
        const double v = c.profile(x);
        return v * v;
    };
    return std::sqrt(integrate(f2, -1.0, 1.0, rule, c.profile_breakpoints, 8));
}

ConvergenceRow solve_one_level(const ManufacturedCase& c, int degree, int level, double k,
                               double T, double x_norm, bool inner_parallel) {
    const int n = 1 << level;
    fem::PolySpace space = fem::make_space(fem::uniform_mesh(n), degree);

    fem::AssemblyOptions opts;
    opts.parallel = inner_parallel;
    fem::DenseOperator mass = fem::assemble_mass(space);
    fem::DenseOperator stiff = fem::assemble_stiffness(space, c.kernel, c.bc, c.form, opts);

    const Eigen::VectorXd load_x = fem::load_vector(space, c.profile, c.profile_breakpoints);
    const Eigen::VectorXd load_w =
        fem::load_vector(space, c.source_profile, c.source_breakpoints);
    auto load = [load_x, load_w](double t) -> Eigen::VectorXd {
        return 2.0 * load_x + t * t * load_w;
    };

    newmark::TimeGrid grid = newmark::make_grid(k, T);
    newmark::EvolveOptions eopts;
    eopts.h_min = space.mesh.h_min();
    // The operator is bounded, so the h/10 rule is far more conservative
    // than the actual CFL limit here; the spectral-radius check still runs.
    eopts.override_stability_guard = true;
    eopts.snapshot_stride = grid.n_steps; // only the endpoints are needed

    Eigen::VectorXd zero = Eigen::VectorXd::Zero(space.dim());
    newmark::Trajectory traj =
        newmark::evolve(mass.matrix, stiff.matrix, zero, zero, load, grid, eopts);

    const Eigen::VectorXd u_final = traj.frame(traj.frame_count() - 1);
    auto exact = [&](double x) { return T * T * c.profile(x); };
    const double err =
        fem::l2_error(space, u_final, exact, c.profile_breakpoints) / (T * T * x_norm);

    ConvergenceRow row;
    row.bc = c.bc;
    row.form = c.form;
    row.degree = degree;
    row.level = level;
    row.n_elements = n;
    row.error = err;
    row.order = std::numeric_limits<double>::quiet_NaN();
    return row;
}

} // namespace

ConvergenceReport run_convergence(const ManufacturedCase& c, const std::vector<int>& degrees,
                                  const std::vector<int>& levels, double k, double T,
                                  bool parallel) {
    if (degrees.empty() || levels.empty())
        throw std::invalid_argument("run_convergence: empty degree or level list");
    if (!(k > 0.0) || k > 0.005 + 1e-15)
        throw std::invalid_argument(
            "run_convergence: time step must satisfy 0 < k <= 0.005 so temporal error "
            "stays below the spatial error being measured");
    if (!(T > 0.0))
        throw std::invalid_argument("run_convergence: T must be positive");
    for (int level : levels)
        if (level < 0 || level > 14)
            throw std::invalid_argument("run_convergence: level out of range [0,14]");

    std::vector<int> lv = levels;
    std::sort(lv.begin(), lv.end());
    lv.erase(std::unique(lv.begin(), lv.end()), lv.end());

    struct Combo {
        int degree;
        int level;
    };
    std::vector<Combo> combos;
    for (int d : degrees)
        for (int l : lv)
            combos.push_back({d, l});

    const double x_norm = profile_l2_norm(c);
    const int n_combo = static_cast<int>(combos.size());
    std::vector<ConvergenceRow> rows(combos.size());
    std::vector<std::string> failures(combos.size());

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int i = 0; i < n_combo; ++i) {
        try {
            rows[i] = solve_one_level(c, combos[i].degree, combos[i].level, k, T, x_norm,
                                      !parallel);
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    }

    std::string merged;
    for (int i = 0; i < n_combo; ++i) {
        if (failures[i].empty())
            continue;
        merged += "  (ell=" + std::to_string(combos[i].degree) +
                  ", level=" + std::to_string(combos[i].level) + "): " + failures[i] + "\n";
    }
    if (!merged.empty())
        throw std::runtime_error("run_convergence: level solves failed:\n" + merged);

    // Observed order between consecutive levels, attached to the finer row.
    ConvergenceReport report;
    report.rows = std::move(rows);
    const int n_levels = static_cast<int>(lv.size());
    for (size_t d = 0; d < degrees.size(); ++d) {
        for (int j = 1; j < n_levels; ++j) {
            ConvergenceRow& fine = report.rows[d * n_levels + j];
            const ConvergenceRow& coarse = report.rows[d * n_levels + j - 1];
            fine.order = -std::log2(fine.error / coarse.error);
        }
    }
    return report;
}

void write_convergence_csv(const ConvergenceReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_convergence_csv: cannot open '" + path + "'");
    out << "# schema=1\n";
    out << "bc,form,ell,level,N,error,order\n";
    char buf[160];
    for (const ConvergenceRow& r : report.rows) {
        std::snprintf(buf, sizeof buf, "%s,%s,%d,%d,%d,%.12e,", to_string(r.bc),
                      to_string(r.form), r.degree, r.level, r.n_elements, r.error);
        out << buf;
        if (std::isnan(r.order))
            out << "nan\n";
        else {
            std::snprintf(buf, sizeof buf, "%.6f\n", r.order);
            out << buf;
        }
    }
    if (!out)
        throw std::runtime_error("write_convergence_csv: write to '" + path + "' failed");
}

std::string format_convergence_table(const ConvergenceReport& report) {
    std::ostringstream out;
    char buf[160];
    const ConvergenceRow* prev = nullptr;
    for (const ConvergenceRow& r : report.rows) {
        const bool new_block = prev == nullptr || prev->bc != r.bc || prev->form != r.form ||
                               prev->degree != r.degree;
        if (new_block) {
            if (prev != nullptr)
                out << "\n";
            std::snprintf(buf, sizeof buf, "bc=%s form=%s ell=%d\n", to_string(r.bc),
                          to_string(r.form), r.degree);
            out << buf;
            out << "  level      N        error     order\n";
        }
        if (std::isnan(r.order))
            std::snprintf(buf, sizeof buf, "  %5d  %5d  %11.4e        --\n", r.level,
                          r.n_elements, r.error);
        else
            std::snprintf(buf, sizeof buf, "  %5d  %5d  %11.4e  %8.3f\n", r.level,
                          r.n_elements, r.error, r.order);
        out << buf;
        prev = &r;
    }
    return out.str();
}

FemSystem build_system(BoundaryCondition bc, OperatorForm form, const Micromodulus& kernel,
                       int n_elements, int degree, const fem::AssemblyOptions& opts) {
    FemSystem sys{fem::make_space(fem::uniform_mesh(n_elements), degree), {}, {}};
    sys.mass = fem::assemble_mass(sys.space);
    sys.stiffness = fem::assemble_stiffness(sys.space, kernel, bc, form, opts);
    return sys;
}

SpectralSolution spectral_solution(BoundaryCondition bc, OperatorForm form,
                                   const Micromodulus& kernel, const InitialData& u0,
                                   const InitialData& v0, int cutoff) {
    NonlocalOperator op = build_operator(kernel, bc, form, cutoff);
    CoefficientVector u0c = project(u0.f, bc, cutoff, u0.breakpoints);
    CoefficientVector v0c = project(v0.f, bc, cutoff, v0.breakpoints);
    return solve_homogeneous(op, u0c, v0c);
}

namespace {

std::vector<double> merged_jumps(const InitialData& u0, const InitialData& v0) {
    std::vector<double> jumps = u0.jump_locations;
    jumps.insert(jumps.end(), v0.jump_locations.begin(), v0.jump_locations.end());
    std::sort(jumps.begin(), jumps.end());
    jumps.erase(std::unique(jumps.begin(), jumps.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                jumps.end());
    return jumps;
}

/// Index of the mesh node matching x (1e-12), or -1.
int node_index_of(const fem::Mesh& mesh, double x) {
    for (int i = 0; i < static_cast<int>(mesh.nodes.size()); ++i)
        if (std::abs(mesh.nodes[i] - x) <= 1e-12)
            return i;
    return -1;
}

} // namespace

EvolutionRun run_evolution(const EvolutionConfig& cfg) {
    const InitialData u0 = initial_data(cfg.u0);
    const InitialData v0 = initial_data(cfg.v0);
    const std::vector<double> jumps = merged_jumps(u0, v0);

    fem::Mesh mesh = fem::uniform_mesh(cfg.n_elements);
    std::vector<int> jump_interfaces;
    for (double j : jumps) {
        const int node = node_index_of(mesh, j);
        if (node <= 0 || node >= mesh.element_count())
            throw std::invalid_argument(
                "run_evolution: mesh does not align with the data discontinuity at x = " +
                std::to_string(j) + "; choose n_elements so that it lands on an interior node");
        jump_interfaces.push_back(node - 1); // interface i sits at node i+1
    }

    EvolutionRun run{fem::make_space(std::move(mesh), cfg.degree), {}, jumps, {}, false};
    const fem::PolySpace& space = run.space;

    fem::DenseOperator mass = fem::assemble_mass(space);
    fem::DenseOperator stiff = fem::assemble_stiffness(space, cfg.kernel, cfg.bc, cfg.form);

    const Eigen::VectorXd u0v = fem::l2_project(space, u0.f, u0.breakpoints);
    const Eigen::VectorXd v0v = fem::l2_project(space, v0.f, v0.breakpoints);

    newmark::TimeGrid grid = newmark::make_grid(cfg.k, cfg.T);
    newmark::EvolveOptions eopts;
    eopts.h_min = space.mesh.h_min();
    eopts.override_stability_guard = cfg.override_stability_guard;
    eopts.snapshot_stride = cfg.snapshot_stride;
    run.trajectory = newmark::evolve(mass.matrix, stiff.matrix, u0v, v0v, {}, grid, eopts);

    run.symmetric_data = u0.symmetric && v0.symmetric && space.mesh.is_symmetric();

    // Symmetry samples sit strictly inside elements, never on an interface,
    // so the one-sided traces cannot contaminate the defect.
    Eigen::VectorXd sym_x;
    if (run.symmetric_data) {
        const int ne = space.mesh.element_count();
        sym_x.resize(3 * ne);
        for (int e = 0; e < ne; ++e) {
            const double a = space.mesh.a(e);
            const double h = space.mesh.h(e);
            sym_x[3 * e + 0] = a + 0.25 * h;
            sym_x[3 * e + 1] = a + 0.5 * h;
            sym_x[3 * e + 2] = a + 0.75 * h;
        }
    }

    run.observables.reserve(run.trajectory.frame_count());
    for (int f = 0; f < run.trajectory.frame_count(); ++f) {
        const Eigen::VectorXd u = run.trajectory.frame(f);
        FrameObservables obs;
        obs.t = run.trajectory.times[f];
        obs.left_value = fem::boundary_value(space, u, fem::Side::Left);
        obs.right_value = fem::boundary_value(space, u, fem::Side::Right);
        obs.left_derivative = fem::boundary_derivative(space, u, fem::Side::Left);
        obs.right_derivative = fem::boundary_derivative(space, u, fem::Side::Right);

        const Eigen::VectorXd all_jumps = fem::interface_jumps(space, u);
        obs.jumps.reserve(jump_interfaces.size());
        for (int iface : jump_interfaces)
            obs.jumps.push_back(all_jumps[iface]);
        obs.max_other_jump = 0.0;
        for (int i = 0; i < all_jumps.size(); ++i) {
            if (std::find(jump_interfaces.begin(), jump_interfaces.end(), i) !=
                jump_interfaces.end())
                continue;
            obs.max_other_jump = std::max(obs.max_other_jump, std::abs(all_jumps[i]));
        }

        if (run.symmetric_data) {
            const Eigen::VectorXd vp = space.values(u, sym_x);
            const Eigen::VectorXd vm = space.values(u, -sym_x);
            obs.symmetry_defect = (vp - vm).cwiseAbs().maxCoeff();
        } else {
            obs.symmetry_defect = std::numeric_limits<double>::quiet_NaN();
        }
        obs.l2 = fem::l2_norm(space, u);
        run.observables.push_back(std::move(obs));
    }
    return run;
}

double cross_validate(BoundaryCondition bc, OperatorForm form, const Micromodulus& kernel,
                      const InitialData& u0, const InitialData& v0,
                      const std::vector<double>& t_checkpoints, const CrossValidateConfig& cfg) {
    if (t_checkpoints.empty())
        throw std::invalid_argument("cross_validate: no checkpoint times");
    std::vector<long long> steps;
    for (double t : t_checkpoints) {
        if (t < 0.0)
            throw std::invalid_argument("cross_validate: negative checkpoint time");
        const long long n = std::llround(t / cfg.k);
        if (std::abs(static_cast<double>(n) * cfg.k - t) > 1e-9 * std::max(1.0, t))
            throw std::invalid_argument(
                "cross_validate: checkpoint times must be multiples of the time step");
        steps.push_back(n);
    }

    // FEM path.
    const std::vector<double> jumps = merged_jumps(u0, v0);
    fem::Mesh mesh = fem::uniform_mesh(cfg.n_elements);
    for (double j : jumps)
        if (node_index_of(mesh, j) < 0)
            throw std::invalid_argument(
                "cross_validate: mesh does not align with the data discontinuity at x = " +
                std::to_string(j));
    fem::PolySpace space = fem::make_space(std::move(mesh), cfg.degree);
    fem::DenseOperator mass = fem::assemble_mass(space);
    fem::DenseOperator stiff = fem::assemble_stiffness(space, kernel, bc, form);
    const Eigen::VectorXd u0v = fem::l2_project(space, u0.f, u0.breakpoints);
    const Eigen::VectorXd v0v = fem::l2_project(space, v0.f, v0.breakpoints);

    // Spectral path, fully independent of the mesh.
    SpectralSolution sol = spectral_solution(bc, form, kernel, u0, v0, cfg.spectral_cutoff);

    const long long max_steps = *std::max_element(steps.begin(), steps.end());

    long long stride = 0;
    for (long long n : steps)
        stride = std::gcd(stride, n);
    if (stride == 0)
        stride = 1;

    newmark::Trajectory traj;
    if (max_steps > 0) {
        newmark::TimeGrid grid = newmark::make_grid(cfg.k, static_cast<double>(max_steps) * cfg.k);
        newmark::EvolveOptions eopts;
        eopts.h_min = space.mesh.h_min();
        eopts.snapshot_stride = static_cast<int>(stride);
        traj = newmark::evolve(mass.matrix, stiff.matrix, u0v, v0v, {}, grid, eopts);
    }

    // Elementwise Gauss quadrature of (u_spec - u_fem)^2; enough points per
    // element to resolve the top retained spectral modes against the targets.
    const int q = cfg.degree + 10;
    const GaussRule& rule = gauss_legendre(q);
    const int ne = space.mesh.element_count();
    Eigen::VectorXd xs(ne * q), ws(ne * q);
    for (int e = 0; e < ne; ++e) {
        const double half = 0.5 * space.mesh.h(e);
        const double mid = 0.5 * (space.mesh.a(e) + space.mesh.b(e));
        for (int i = 0; i < q; ++i) {
            xs[e * q + i] = mid + half * rule.nodes[i];
            ws[e * q + i] = half * rule.weights[i];
        }
    }

    double worst = 0.0;
    for (size_t c = 0; c < steps.size(); ++c) {
        const double t = static_cast<double>(steps[c]) * cfg.k;
        const Eigen::VectorXd u_fem =
            steps[c] == 0 ? u0v : traj.frame(traj.frame_at(t));
        const Eigen::VectorXd fem_vals = space.values(u_fem, xs);
        const Eigen::VectorXd spec_vals = sol.values(xs, t);
        const double disc2 = (ws.array() * (spec_vals - fem_vals).array().square()).sum();
        worst = std::max(worst, std::sqrt(std::max(0.0, disc2)));
    }
    return worst;
}

} // namespace nlwave::harness
