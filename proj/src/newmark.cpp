#include "nlwave/newmark.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nlwave::newmark {

TimeGrid make_grid(double k, double T) {
    if (!(k > 0.0) || !(T > 0.0))
        throw std::invalid_argument("make_grid: k and T must be positive");
    const int n = static_cast<int>(std::llround(T / k));
    if (n < 1 || std::abs(n * k - T) > 1e-12 * std::max(1.0, std::abs(T)))
        throw std::invalid_argument("make_grid: T must be an integer multiple of k");
    return TimeGrid{k, T, n};
}

Eigen::VectorXd first_step(const Eigen::MatrixXd& m, const Eigen::MatrixXd& a,
                           const Eigen::VectorXd& u0, const Eigen::VectorXd& v0,
                           const Eigen::VectorXd& b0, double k) {
    Eigen::VectorXd rhs = m * u0 - (0.5 * k * k) * (a * u0) + k * (m * v0) + (0.5 * k * k) * b0;
    return m.llt().solve(rhs);
}

Eigen::VectorXd step(const Eigen::MatrixXd& m, const Eigen::MatrixXd& a,
                     const Eigen::VectorXd& u_curr, const Eigen::VectorXd& u_prev,
                     const Eigen::VectorXd& b_n, double k) {
    Eigen::VectorXd rhs = 2.0 * (m * u_curr) - (k * k) * (a * u_curr) - m * u_prev + (k * k) * b_n;
    return m.llt().solve(rhs);
}

double discrete_energy(const Eigen::MatrixXd& m, const Eigen::MatrixXd& a,
                       const Eigen::VectorXd& u_n, const Eigen::VectorXd& u_np1, double k) {
    const Eigen::VectorXd d = u_np1 - u_n;
    return 0.5 / (k * k) * d.dot(m * d) + 0.5 * u_np1.dot(a * u_n);
}

double spectral_radius_estimate(const Eigen::MatrixXd& m, const Eigen::MatrixXd& a,
                                int iterations) {
    const auto llt = m.llt();
    Eigen::VectorXd v(a.rows());
    for (long i = 0; i < v.size(); ++i) v[i] = 1.0 + 1e-3 * std::sin(1.0 + i);
    v.normalize();
    double rho = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Eigen::VectorXd w = llt.solve(a * v);
        rho = w.norm();
        if (rho == 0.0) return 0.0;
        v = w / rho;
    }
    return rho;
}

int Trajectory::frame_at(double t) const {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) < 1e-9) return static_cast<int>(i);
    throw std::out_of_range("Trajectory::frame_at: no frame stored at that time");
}

Trajectory evolve(const Eigen::MatrixXd& m, const Eigen::MatrixXd& a,
                  const Eigen::VectorXd& u0, const Eigen::VectorXd& v0,
                  const std::function<Eigen::VectorXd(double)>& b, const TimeGrid& grid,
                  const EvolveOptions& opts) {
    if (opts.h_min > 0.0 && grid.k > opts.h_min / 10.0 + 1e-15 &&
        !opts.override_stability_guard) {
        std::ostringstream msg;
        msg << "evolve: time step k=" << grid.k << " exceeds the stability guard h_min/10="
            << opts.h_min / 10.0
            << "; shrink k or set override_stability_guard (the nonlocal operator is bounded,"
            << " so the guard is conservative)";
        throw std::runtime_error(msg.str());
    }

    Trajectory traj;
    traj.k = grid.k;
    traj.stride = opts.snapshot_stride > 0 ? opts.snapshot_stride
                                           : std::max(1, grid.n_steps / 200);

    if (opts.check_spectral_radius) {
        const double rho = spectral_radius_estimate(m, a);
        if (grid.k * grid.k * rho >= 4.0) {
            std::ostringstream msg;
            msg << "evolve: k^2 rho(M^-1 A) = " << grid.k * grid.k * rho
                << " >= 4; the explicit scheme is outside its stability interval";
            traj.warnings.push_back(msg.str());
        }
    }

    const auto llt = m.llt();
    const double k = grid.k;
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(u0.size());
    auto load = [&](double t) -> Eigen::VectorXd { return b ? b(t) : zero; };

    // Frame storage: every stride-th step plus the final step.
    std::vector<int> snap_steps;
    for (int n = 0; n <= grid.n_steps; n += traj.stride) snap_steps.push_back(n);
    if (snap_steps.back() != grid.n_steps) snap_steps.push_back(grid.n_steps);
    traj.frames.resize(u0.size(), static_cast<long>(snap_steps.size()));
    traj.times.resize(snap_steps.size());

    std::size_t next_snap = 0;
    auto store = [&](int n, const Eigen::VectorXd& u) {
        if (next_snap < snap_steps.size() && snap_steps[next_snap] == n) {
            traj.frames.col(static_cast<long>(next_snap)) = u;
            traj.times[next_snap] = n * k;
            ++next_snap;
        }
    };

    Eigen::VectorXd u_prev = u0;
    store(0, u_prev);
    if (grid.n_steps == 0) return traj;

    Eigen::VectorXd rhs =
        m * u0 - (0.5 * k * k) * (a * u0) + k * (m * v0) + (0.5 * k * k) * load(0.0);
    Eigen::VectorXd u_curr = llt.solve(rhs);
    store(1, u_curr);

    for (int n = 1; n < grid.n_steps; ++n) {
        rhs = 2.0 * (m * u_curr) - (k * k) * (a * u_curr) - m * u_prev + (k * k) * load(n * k);
        Eigen::VectorXd u_next = llt.solve(rhs);
        u_prev.swap(u_curr);
        u_curr.swap(u_next);
        store(n + 1, u_curr);
    }

    if (!u_curr.allFinite())
        throw std::runtime_error("evolve: trajectory blew up (NaN/Inf); instability detected");
    return traj;
}

} // namespace nlwave::newmark
