#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace nlwave::newmark {

/// Uniform time grid t_n = n*k covering [0, T] with n_steps * k = T.
struct TimeGrid {
    double k = 0.0;
    double T = 0.0;
    int n_steps = 0;
};

/// Validates n*k = T to 1e-12 (relative). Throws std::invalid_argument.
TimeGrid make_grid(double k, double T);

/// Rolling pair of displacement vectors the recurrence advances.
struct EvolutionState {
    Eigen::VectorXd u_prev;
    Eigen::VectorXd u_curr;
    int n = 0;
};

/// Startup step: u1 = M^{-1}[(M - k^2/2 A)u0 + k M v0 + k^2/2 b0].
Eigen::VectorXd first_step(const Eigen::MatrixXd& m, const Eigen::MatrixXd& a,
                           const Eigen::VectorXd& u0, const Eigen::VectorXd& v0,
                           const Eigen::VectorXd& b0, double k);

/// Central-difference step: u_{n+1} = M^{-1}[(2M - k^2 A)u_n - M u_{n-1} + k^2 b_n].
/// The same formula with the history pair swapped runs the recurrence
/// backwards (time reversal).
Eigen::VectorXd step(const Eigen::MatrixXd& m, const Eigen::MatrixXd& a,
                     const Eigen::VectorXd& u_curr, const Eigen::VectorXd& u_prev,
                     const Eigen::VectorXd& b_n, double k);

/// Discrete energy of the homogeneous scheme between consecutive iterates:
/// (1/(2k^2)) ||u_{n+1} - u_n||_M^2 + (1/2) <A u_n, u_{n+1}>.
double discrete_energy(const Eigen::MatrixXd& m, const Eigen::MatrixXd& a,
                       const Eigen::VectorXd& u_n, const Eigen::VectorXd& u_np1, double k);

/// Power-iteration estimate of the spectral radius of M^{-1} A.
double spectral_radius_estimate(const Eigen::MatrixXd& m, const Eigen::MatrixXd& a,
                                int iterations = 50);

struct EvolveOptions {
    /// Smallest element size for the k <= h_min/10 stability guard; 0 skips it.
    double h_min = 0.0;
    bool override_stability_guard = false;
    /// Steps between stored frames; 0 picks ~200 uniformly spaced frames.
    int snapshot_stride = 0;
    /// Estimate rho(M^{-1}A) up front and warn when k^2 rho >= 4.
    bool check_spectral_radius = true;
};

struct Trajectory {
    std::vector<double> times;
    Eigen::MatrixXd frames; // one column per stored time
    int stride = 1;
    double k = 0.0;
    std::vector<std::string> warnings;

    int frame_count() const { return static_cast<int>(times.size()); }
    Eigen::VectorXd frame(int i) const { return frames.col(i); }
    /// Column index of time t among the stored frames (1e-9 match).
    int frame_at(double t) const;
};

/// Runs the explicit scheme over the grid with load b(t) (empty = zero
/// source), storing strided snapshots (frame 0 is u0, the last is u(T)).
/// Refuses k > h_min/10 unless overridden. Throws std::runtime_error on the
/// guard and on NaN/Inf blowup.
Trajectory evolve(const Eigen::MatrixXd& m, const Eigen::MatrixXd& a,
                  const Eigen::VectorXd& u0, const Eigen::VectorXd& v0,
                  const std::function<Eigen::VectorXd(double)>& b, const TimeGrid& grid,
                  const EvolveOptions& opts = {});

} // namespace nlwave::newmark
