#include "nlwave/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace nlwave {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kInvSqrt2 = 0.70710678118654752440;

std::vector<double> sorted_unique(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-13; }),
            v.end());
    return v;
}

} // namespace

const char* to_string(OperatorForm form) {
    switch (form) {
        case OperatorForm::CanonicalPeriodic: return "periodic";
        case OperatorForm::CanonicalAntiperiodic: return "antiperiodic";
        case OperatorForm::SimpleNeumann: return "neumann-simple";
        case OperatorForm::SimpleDirichlet: return "dirichlet-simple";
        case OperatorForm::CanonicalNeumann: return "neumann-canonical";
        case OperatorForm::CanonicalDirichlet: return "dirichlet-canonical";
    }
    return "unknown";
}

OperatorForm form_from_string(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "periodic") return OperatorForm::CanonicalPeriodic;
    if (s == "antiperiodic") return OperatorForm::CanonicalAntiperiodic;
    if (s == "neumann-simple" || s == "neumann") return OperatorForm::SimpleNeumann;
    if (s == "dirichlet-simple" || s == "dirichlet") return OperatorForm::SimpleDirichlet;
    if (s == "neumann-canonical") return OperatorForm::CanonicalNeumann;
    if (s == "dirichlet-canonical") return OperatorForm::CanonicalDirichlet;
    throw std::invalid_argument(
        "unknown operator form '" + s +
        "' (expected periodic, antiperiodic, neumann[-simple], dirichlet[-simple], "
        "neumann-canonical, or dirichlet-canonical)");
}

BoundaryCondition bc_of(OperatorForm form) {
    switch (form) {
        case OperatorForm::CanonicalPeriodic: return BoundaryCondition::Periodic;
        case OperatorForm::CanonicalAntiperiodic: return BoundaryCondition::Antiperiodic;
        case OperatorForm::SimpleNeumann:
        case OperatorForm::CanonicalNeumann: return BoundaryCondition::Neumann;
        case OperatorForm::SimpleDirichlet:
        case OperatorForm::CanonicalDirichlet: return BoundaryCondition::Dirichlet;
    }
    return BoundaryCondition::Periodic;
}

OperatorForm default_form(BoundaryCondition bc) {
    switch (bc) {
        case BoundaryCondition::Periodic: return OperatorForm::CanonicalPeriodic;
        case BoundaryCondition::Antiperiodic: return OperatorForm::CanonicalAntiperiodic;
        case BoundaryCondition::Neumann: return OperatorForm::SimpleNeumann;
        case BoundaryCondition::Dirichlet: return OperatorForm::SimpleDirichlet;
    }
    return OperatorForm::CanonicalPeriodic;
}

namespace {

double clamp_phi(double phi) {
    if (phi < 0.0) {
        if (phi < -1e-12)
            throw std::domain_error("negative operator mode: phi = " + std::to_string(phi));
        return 0.0;
    }
    return phi;
}

} // namespace

double cos_sqrt(double t, double phi) { return std::cos(t * std::sqrt(clamp_phi(phi))); }

double sinc_sqrt(double t, double phi) {
    phi = clamp_phi(phi);
    const double z = t * t * phi;
    if (z < 1e-4)
        return t * (1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0);
    const double w = std::sqrt(phi);
    return std::sin(t * w) / w;
}

NonlocalOperator build_operator(const Micromodulus& c, BoundaryCondition bc,
                                OperatorForm form, int M,
                                std::optional<double> constant_override) {
    if (bc != bc_of(form))
        throw std::domain_error(std::string("operator form ") + to_string(form) +
                                    " acts in the " + to_string(bc_of(form)) +
                                    " basis, not " + to_string(bc));
    return build_operator(c, form, M, constant_override);
}

NonlocalOperator build_operator(const Micromodulus& c, OperatorForm form, int M,
                                std::optional<double> constant_override) {
    if (M < 1) throw std::invalid_argument("operator truncation must be >= 1");
    const BoundaryCondition bc = bc_of(form);

    NonlocalOperator op;
    op.bc = bc;
    op.form = form;
    op.cutoff = M;
    op.kernel = c;

    RegulatingFunction& reg = op.regulating;
    reg.bc = bc;
    reg.form = form;
    reg.cutoff = M;

    const int n = coefficient_count(bc, M);
    const CoefficientVector ck = project(c.evaluator, bc, M, c.breakpoints);
    for (int i = 0; i < n; ++i)
        if (std::abs(ck.values[i].imag()) >= 1e-10)
            throw std::domain_error(
                "kernel has a complex eigencoefficient (|imag| = " +
                std::to_string(std::abs(ck.values[i].imag())) +
                "); self-adjoint operators need an even kernel");
    reg.kernel_coeff = ck.values.real();
    reg.phi.resize(n);

    const bool needs_even = (form != OperatorForm::CanonicalPeriodic &&
                             form != OperatorForm::CanonicalAntiperiodic);
    if (needs_even && !c.is_even)
        throw std::domain_error(std::string("the ") + to_string(form) +
                                " form requires an even kernel");

    switch (form) {
        case OperatorForm::CanonicalPeriodic:
        case OperatorForm::CanonicalAntiperiodic: {
            reg.constant = constant_override ? *constant_override : silling_constant(c, bc);
            reg.phi = reg.constant - reg.kernel_coeff.array();
            if (form == OperatorForm::CanonicalPeriodic)
                op.ext_p = extend(c, ExtensionMode::Periodic2);
            else
                op.ext_a = extend(c, ExtensionMode::Antiperiodic2);
            break;
        }
        case OperatorForm::CanonicalNeumann:
        case OperatorForm::CanonicalDirichlet: {
            reg.constant = constant_override ? *constant_override : silling_constant(c, bc);
            reg.phi = reg.constant - reg.kernel_coeff.array();
            if (form == OperatorForm::CanonicalNeumann) {
                op.split = half_wave_split(c);
                op.ext_half1 = extend(op.split.c1, ExtensionMode::Periodic2);
                op.ext_half2 = extend(op.split.c2, ExtensionMode::Periodic2);
            }
            break;
        }
        case OperatorForm::SimpleNeumann:
        case OperatorForm::SimpleDirichlet: {
            reg.constant = constant_override
                               ? *constant_override
                               : silling_constant(c, BoundaryCondition::Periodic);
            const int mp = M / 2;
            const int ma = std::max(0, (M - 1) / 2);
            const CoefficientVector cp =
                project(c.evaluator, BoundaryCondition::Periodic, mp, c.breakpoints);
            const CoefficientVector ca =
                project(c.evaluator, BoundaryCondition::Antiperiodic, ma, c.breakpoints);
            reg.phi1 = Eigen::VectorXd::Zero(n);
            reg.phi2 = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < n; ++i) {
                const int k = mode_at(bc, i, M);
                if (k % 2 == 0)
                    reg.phi1[i] = cp.coeff(k / 2).real();
                else
                    reg.phi2[i] = ca.coeff((k - 1) / 2).real();
                reg.phi[i] = kSqrt2 * (2.0 * reg.constant - reg.phi1[i] - reg.phi2[i]);
            }
            op.ext_p = extend(c, ExtensionMode::Periodic2);
            op.ext_a = extend(c, ExtensionMode::Antiperiodic2);
            break;
        }
    }
    return op;
}

double NonlocalOperator::identity_multiple() const {
    return regulating.value_at_mode(cutoff);
}

CoefficientVector NonlocalOperator::apply(const CoefficientVector& u) const {
    if (u.bc != bc || u.cutoff != cutoff)
        throw std::domain_error("coefficient vector does not match the operator basis");
    CoefficientVector v = u;
    v.values.array() *= regulating.phi.cast<std::complex<double>>().array();
    return v;
}

CoefficientVector NonlocalOperator::apply_function(const std::function<double(double)>& g,
                                                   const CoefficientVector& u) const {
    if (u.bc != bc || u.cutoff != cutoff)
        throw std::domain_error("coefficient vector does not match the operator basis");
    CoefficientVector v = u;
    for (int i = 0; i < v.size(); ++i) v.values[i] *= g(regulating.phi[i]);
    return v;
}

namespace {

// integral over (-1,1) of ext(x - s*y) u(y) dy, panels split where the
// translated kernel kinks cross and at u's own breakpoints.
double kernel_weighted_integral(const ExtendedKernel& ext,
                                const std::function<double(double)>& u, double x, double s,
                                const std::vector<double>& u_bps, int q, int min_pieces) {
    std::vector<double> bps = u_bps;
    for (double b : ext.breakpoints_in(x - 1.0 - 1e-9, x + 1.0 + 1e-9))
        bps.push_back(s * (x - b));
    const auto f = [&ext, &u, x, s](double y) { return ext(x - s * y) * u(y); };
    return integrate(f, -1.0, 1.0, QuadratureRule{q, true}, sorted_unique(std::move(bps)),
                     min_pieces);
}

double plain_integral(const std::function<double(double)>& u,
                      const std::vector<double>& u_bps, int q, int min_pieces) {
    return integrate(u, -1.0, 1.0, QuadratureRule{q, true}, u_bps, min_pieces);
}

double convolve_via_cached(const NonlocalOperator& op, const std::function<double(double)>& u,
                           double x, const std::vector<double>& u_bps, int q, int min_pieces) {
    switch (op.form) {
        case OperatorForm::CanonicalPeriodic:
            return kInvSqrt2 * kernel_weighted_integral(op.ext_p, u, x, +1.0, u_bps, q, min_pieces);
        case OperatorForm::CanonicalAntiperiodic:
            return kInvSqrt2 * kernel_weighted_integral(op.ext_a, u, x, +1.0, u_bps, q, min_pieces);
        case OperatorForm::SimpleNeumann:
            return 0.5 * kInvSqrt2 *
                   (kernel_weighted_integral(op.ext_p, u, x, +1.0, u_bps, q, min_pieces) +
                    kernel_weighted_integral(op.ext_p, u, x, -1.0, u_bps, q, min_pieces) +
                    kernel_weighted_integral(op.ext_a, u, x, +1.0, u_bps, q, min_pieces) -
                    kernel_weighted_integral(op.ext_a, u, x, -1.0, u_bps, q, min_pieces));
        case OperatorForm::SimpleDirichlet:
            return 0.5 * kInvSqrt2 *
                   (kernel_weighted_integral(op.ext_p, u, x, +1.0, u_bps, q, min_pieces) -
                    kernel_weighted_integral(op.ext_p, u, x, -1.0, u_bps, q, min_pieces) +
                    kernel_weighted_integral(op.ext_a, u, x, +1.0, u_bps, q, min_pieces) +
                    kernel_weighted_integral(op.ext_a, u, x, -1.0, u_bps, q, min_pieces));
        case OperatorForm::CanonicalNeumann:
            return 0.5 * (kernel_weighted_integral(op.ext_half1, u, x, +1.0, u_bps, q, min_pieces) +
                          kernel_weighted_integral(op.ext_half1, u, x, -1.0, u_bps, q, min_pieces) -
                          kernel_weighted_integral(op.ext_half2, u, x, +1.0, u_bps, q, min_pieces) -
                          kernel_weighted_integral(op.ext_half2, u, x, -1.0, u_bps, q, min_pieces)) +
                   op.split.k_n * kInvSqrt2 * plain_integral(u, u_bps, q, min_pieces);
        case OperatorForm::CanonicalDirichlet: {
            const CoefficientVector uc = project(u, op.bc, op.cutoff, u_bps);
            CoefficientVector w = uc;
            w.values.array() *= op.regulating.kernel_coeff.cast<std::complex<double>>().array();
            return synthesize(w, x).real();
        }
    }
    return 0.0;
}

} // namespace

double NonlocalOperator::apply_integral(const std::function<double(double)>& u, double x,
                                        const std::vector<double>& u_breakpoints,
                                        int quad_order) const {
    const double conv = convolve_via_cached(*this, u, x, u_breakpoints, quad_order, 1);
    const double c = regulating.constant;
    switch (form) {
        case OperatorForm::SimpleNeumann:
        case OperatorForm::SimpleDirichlet:
            return kSqrt2 * (2.0 * c * u(x) - conv);
        default:
            return c * u(x) - conv;
    }
}

std::vector<double> NonlocalOperator::pointwise_result_breakpoints(
    const std::vector<double>& u_breakpoints) const {
    std::vector<double> ys = u_breakpoints;
    ys.push_back(-1.0);
    ys.push_back(1.0);

    std::vector<double> out = u_breakpoints;
    auto add_images = [&out, &ys](const ExtendedKernel& ek, bool both_signs) {
        for (double b : ek.breakpoints_in(-2.0 - 1e-9, 2.0 + 1e-9))
            for (double y : ys) {
                out.push_back(b + y);
                if (both_signs) out.push_back(b - y);
            }
    };
    switch (form) {
        case OperatorForm::CanonicalPeriodic: add_images(ext_p, false); break;
        case OperatorForm::CanonicalAntiperiodic: add_images(ext_a, false); break;
        case OperatorForm::SimpleNeumann:
        case OperatorForm::SimpleDirichlet:
            add_images(ext_p, true);
            add_images(ext_a, true);
            break;
        case OperatorForm::CanonicalNeumann:
            add_images(ext_half1, true);
            add_images(ext_half2, true);
            break;
        case OperatorForm::CanonicalDirichlet:
            break; // coefficient-space convolution is smooth
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](double v) { return v <= -1.0 + 1e-12 || v >= 1.0 - 1e-12; }),
              out.end());
    return sorted_unique(std::move(out));
}

CoefficientVector abstract_convolve(const CoefficientVector& c_coeffs,
                                    const CoefficientVector& u_coeffs) {
    if (c_coeffs.bc != u_coeffs.bc || c_coeffs.cutoff != u_coeffs.cutoff)
        throw std::domain_error("convolution operands must share basis and truncation");
    CoefficientVector v = u_coeffs;
    v.values.array() *= c_coeffs.values.array();
    return v;
}

double integral_convolve(const Micromodulus& c, const std::function<double(double)>& u,
                         BoundaryCondition bc, OperatorForm form, double x,
                         const std::vector<double>& u_breakpoints, int quad_order,
                         int dirichlet_cutoff) {
    if (bc != bc_of(form))
        throw std::domain_error(std::string("operator form ") + to_string(form) +
                                    " acts in the " + to_string(bc_of(form)) +
                                    " basis, not " + to_string(bc));
    switch (form) {
        case OperatorForm::CanonicalPeriodic: {
            const ExtendedKernel ek = extend(c, ExtensionMode::Periodic2);
            return kInvSqrt2 *
                   kernel_weighted_integral(ek, u, x, +1.0, u_breakpoints, quad_order, 1);
        }
        case OperatorForm::CanonicalAntiperiodic: {
            const ExtendedKernel ek = extend(c, ExtensionMode::Antiperiodic2);
            return kInvSqrt2 *
                   kernel_weighted_integral(ek, u, x, +1.0, u_breakpoints, quad_order, 1);
        }
        case OperatorForm::SimpleNeumann:
        case OperatorForm::SimpleDirichlet: {
            const ExtendedKernel ep = extend(c, ExtensionMode::Periodic2);
            const ExtendedKernel ea = extend(c, ExtensionMode::Antiperiodic2);
            const double pp = kernel_weighted_integral(ep, u, x, +1.0, u_breakpoints, quad_order, 1);
            const double pr = kernel_weighted_integral(ep, u, x, -1.0, u_breakpoints, quad_order, 1);
            const double ap = kernel_weighted_integral(ea, u, x, +1.0, u_breakpoints, quad_order, 1);
            const double ar = kernel_weighted_integral(ea, u, x, -1.0, u_breakpoints, quad_order, 1);
            if (form == OperatorForm::SimpleNeumann)
                return 0.5 * kInvSqrt2 * (pp + pr + ap - ar);
            return 0.5 * kInvSqrt2 * (pp - pr + ap + ar);
        }
        case OperatorForm::CanonicalNeumann: {
            if (!c.is_even)
                throw std::domain_error("the canonical Neumann integral form needs an even kernel");
            const HalfWaveSplit split = half_wave_split(c);
            const ExtendedKernel e1 = extend(split.c1, ExtensionMode::Periodic2);
            const ExtendedKernel e2 = extend(split.c2, ExtensionMode::Periodic2);
            return 0.5 * (kernel_weighted_integral(e1, u, x, +1.0, u_breakpoints, quad_order, 1) +
                          kernel_weighted_integral(e1, u, x, -1.0, u_breakpoints, quad_order, 1) -
                          kernel_weighted_integral(e2, u, x, +1.0, u_breakpoints, quad_order, 1) -
                          kernel_weighted_integral(e2, u, x, -1.0, u_breakpoints, quad_order, 1)) +
                   split.k_n * kInvSqrt2 * plain_integral(u, u_breakpoints, quad_order, 1);
        }
        case OperatorForm::CanonicalDirichlet: {
            if (!c.is_even)
                throw std::domain_error("the canonical Dirichlet form needs an even kernel");
            const CoefficientVector cc =
                project(c.evaluator, BoundaryCondition::Dirichlet, dirichlet_cutoff, c.breakpoints);
            const CoefficientVector uc =
                project(u, BoundaryCondition::Dirichlet, dirichlet_cutoff, u_breakpoints);
            return synthesize(abstract_convolve(cc, uc), x).real();
        }
    }
    return 0.0;
}

CoefficientVector SpectralSolution::coefficients(double t) const {
    CoefficientVector c = u0;
    for (int i = 0; i < c.size(); ++i)
        c.values[i] = cos_sqrt(t, phi[i]) * u0.values[i] + sinc_sqrt(t, phi[i]) * v0.values[i];
    return c;
}

CoefficientVector SpectralSolution::velocity_coefficients(double t) const {
    CoefficientVector c = u0;
    for (int i = 0; i < c.size(); ++i)
        c.values[i] = -phi[i] * sinc_sqrt(t, phi[i]) * u0.values[i] +
                      cos_sqrt(t, phi[i]) * v0.values[i];
    return c;
}

double SpectralSolution::value(double x, double t) const {
    std::complex<double> acc(0.0, 0.0);
    for (int i = 0; i < u0.size(); ++i) {
        const std::complex<double> ci =
            cos_sqrt(t, phi[i]) * u0.values[i] + sinc_sqrt(t, phi[i]) * v0.values[i];
        acc += ci * eigenfunction(bc, mode_at(bc, i, cutoff), x);
    }
    return acc.real();
}

double SpectralSolution::derivative(double x, double t) const {
    std::complex<double> acc(0.0, 0.0);
    for (int i = 0; i < u0.size(); ++i) {
        const std::complex<double> ci =
            cos_sqrt(t, phi[i]) * u0.values[i] + sinc_sqrt(t, phi[i]) * v0.values[i];
        acc += ci * eigenfunction_derivative(bc, mode_at(bc, i, cutoff), x);
    }
    return acc.real();
}

Eigen::VectorXd SpectralSolution::values(const Eigen::VectorXd& xs, double t) const {
    return synthesize_many(coefficients(t), xs);
}

double SpectralSolution::energy(double t) const {
    const CoefficientVector u = coefficients(t);
    const CoefficientVector v = velocity_coefficients(t);
    double e = 0.0;
    for (int i = 0; i < u.size(); ++i)
        e += std::norm(v.values[i]) + phi[i] * std::norm(u.values[i]);
    return 0.5 * e;
}

SpectralSolution solve_homogeneous(const NonlocalOperator& op, const CoefficientVector& u0,
                                   const CoefficientVector& v0) {
    if (u0.bc != op.bc || u0.cutoff != op.cutoff || v0.bc != op.bc || v0.cutoff != op.cutoff)
        throw std::domain_error("initial coefficients do not match the operator basis");
    SpectralSolution s;
    s.bc = op.bc;
    s.cutoff = op.cutoff;
    s.phi = op.regulating.phi;
    for (int i = 0; i < s.phi.size(); ++i) s.phi[i] = clamp_phi(s.phi[i]);
    s.u0 = u0;
    s.v0 = v0;
    return s;
}

namespace {

class SourceMemo {
  public:
    explicit SourceMemo(const std::function<CoefficientVector(double)>& b) : b_(b) {}

    std::complex<double> at(double tau, int i) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(tau);
        if (it == cache_.end()) it = cache_.emplace(tau, b_(tau).values).first;
        return it->second[i];
    }

  private:
    const std::function<CoefficientVector(double)>& b_;
    std::map<double, Eigen::VectorXcd> cache_;
    std::mutex mu_;
};

} // namespace

CoefficientVector solve_inhomogeneous(const NonlocalOperator& op,
                                      const std::function<CoefficientVector(double)>& b,
                                      double t) {
    CoefficientVector v;
    v.bc = op.bc;
    v.cutoff = op.cutoff;
    const int n = coefficient_count(op.bc, op.cutoff);
    v.values = Eigen::VectorXcd::Zero(n);
    if (t <= 0.0) return v;

    SourceMemo memo(b);
    const Eigen::VectorXd& phi = op.regulating.phi;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        const double p = phi[i];
        const double re = adaptive_simpson(
            [&memo, i, t, p](double tau) { return sinc_sqrt(t - tau, p) * memo.at(tau, i).real(); },
            0.0, t, 1e-10);
        const double im = adaptive_simpson(
            [&memo, i, t, p](double tau) { return sinc_sqrt(t - tau, p) * memo.at(tau, i).imag(); },
            0.0, t, 1e-10);
        v.values[i] = {re, im};
    }
    return v;
}

DecayCheck decay_bound_check(double c, double lambda, double t) {
    if (!(c > 0.0) || lambda > std::min(c, 1.0) + 1e-15)
        throw std::domain_error("decay bound needs c > 0 and lambda <= min(c, 1)");
    DecayCheck r;
    const double al = std::abs(lambda);
    const double at = std::abs(t);
    r.actual_cos = std::abs(cos_sqrt(t, c - lambda) - cos_sqrt(t, c));
    r.bound_cos = (t * t / (2.0 * c) + at / std::sqrt(c)) * al;
    r.actual_sinc = std::abs(sinc_sqrt(t, c - lambda) - sinc_sqrt(t, c));
    r.bound_sinc = (t * t / (6.0 * c) + at / (2.0 * std::sqrt(c))) * al;
    return r;
}

double jump_scale(const NonlocalOperator& op, const std::function<double(double)>& u0,
                  double x_jump, double t, const std::vector<double>& u0_breakpoints) {
    const double eps = 1e-9;
    if (std::abs(u0(x_jump + eps) - u0(x_jump - eps)) < 1e-6)
        throw std::domain_error("initial data has no jump at the requested location");

    std::vector<double> bps = u0_breakpoints;
    bps.push_back(x_jump);
    const CoefficientVector u0c = project(u0, op.bc, op.cutoff, sorted_unique(std::move(bps)));
    CoefficientVector v0c = u0c;
    v0c.values.setZero();
    const SpectralSolution sol = solve_homogeneous(op, u0c, v0c);

    // Both jumps go through the same truncated-series extrapolation so the
    // Gibbs response of the one-sided stencil cancels in the ratio.
    const double h = 1.0 / op.cutoff;
    auto one_sided_jump = [&](double tt) {
        const double up = (8.0 / 3.0) * sol.value(x_jump + h, tt) -
                          2.0 * sol.value(x_jump + 2.0 * h, tt) +
                          (1.0 / 3.0) * sol.value(x_jump + 4.0 * h, tt);
        const double um = (8.0 / 3.0) * sol.value(x_jump - h, tt) -
                          2.0 * sol.value(x_jump - 2.0 * h, tt) +
                          (1.0 / 3.0) * sol.value(x_jump - 4.0 * h, tt);
        return up - um;
    };
    return one_sided_jump(t) / one_sided_jump(0.0);
}

namespace {

// sum_{l=0}^{n} sin((4l+1) pi z / 2): closed ratio form away from the poles of
// the denominator, direct summation near them.
double alternating_mode_kernel(double z, int n) {
    const double a = 0.5 * M_PI * z;
    const double s2a = std::sin(2.0 * a);
    if (std::abs(s2a) < 1e-6) {
        double acc = 0.0;
        for (int l = 0; l <= n; ++l) acc += std::sin((4.0 * l + 1.0) * a);
        return acc;
    }
    return std::sin((2.0 * n + 1.0) * a) * std::sin(2.0 * (n + 1.0) * a) / s2a;
}

} // namespace

ProjectionCheck dirichlet_projection_check(const std::function<double(double)>& u, int n,
                                           double x, const std::vector<double>& u_breakpoints,
                                           int quad_order) {
    if (n < 0) throw std::invalid_argument("projection rank must be >= 0");
    const int M = 4 * n + 1;
    const CoefficientVector uc =
        project(u, BoundaryCondition::Dirichlet, M, u_breakpoints);

    ProjectionCheck r;
    for (int l = 0; l <= n; ++l) {
        const int k = 4 * l + 1;
        r.coefficient_route +=
            (uc.coeff(k) * eigenfunction(BoundaryCondition::Dirichlet, k, x)).real();
    }

    std::vector<double> bps = u_breakpoints;
    for (double b : u_breakpoints) bps.push_back(-b);
    r.kernel_route = integrate(
        [&u, n, x](double y) {
            return 0.5 * alternating_mode_kernel(x - y + 1.0, n) * (u(y) + u(-y));
        },
        -1.0, 1.0, QuadratureRule{quad_order, true}, sorted_unique(std::move(bps)),
        2 * n + 4);
    return r;
}

double dirichlet_convolve_integral_route(const Micromodulus& c,
                                         const std::function<double(double)>& u, int n,
                                         double x, const std::vector<double>& u_breakpoints,
                                         int quad_order) {
    if (!c.is_even)
        throw std::domain_error("the canonical Dirichlet form needs an even kernel");
    if (n < 0) throw std::invalid_argument("projection rank must be >= 0");

    const int M = 4 * n + 1;
    const CoefficientVector cc =
        project(c.evaluator, BoundaryCondition::Dirichlet, M, c.breakpoints);
    std::vector<double> gamma(n + 1);
    for (int l = 0; l <= n; ++l) gamma[l] = cc.coeff(4 * l + 1).real();

    // Finite-rank projection of the kernel; a trigonometric sum, hence smooth
    // and 2-antiperiodic on the whole line by construction.
    auto projected = [&gamma, n](double z) {
        double acc = 0.0;
        for (int l = 0; l <= n; ++l)
            acc += gamma[l] * std::sin(0.5 * M_PI * (4 * l + 1) * (z + 1.0));
        return acc;
    };
    const ExtendedKernel ea = extend(c, ExtensionMode::Antiperiodic2);

    std::vector<double> bps = u_breakpoints;
    for (double b : ea.breakpoints_in(x - 1.0 - 1e-9, x + 1.0 + 1e-9)) bps.push_back(x - b);
    for (double b : ea.breakpoints_in(-x - 1.0 - 1e-9, -x + 1.0 + 1e-9)) bps.push_back(-x - b);

    return integrate(
        [&](double y) {
            const double p1 = projected(x - y);
            const double p2 = projected(-x - y);
            const double a1 = ea(x - y);
            const double a2 = ea(-x - y);
            return 0.5 * (p1 + p2 - (a1 - p1) - (a2 - p2)) * u(y);
        },
        -1.0, 1.0, QuadratureRule{quad_order, true}, sorted_unique(std::move(bps)),
        2 * n + 4);
}

} // namespace nlwave
