#include "nlwave/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace nlwave {

namespace {

// Legendre P_q and P_q' at x by the three-term recurrence.
void legendre_eval(int q, double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    if (q == 0) { p = p0; dp = 0.0; return; }
    for (int n = 2; n <= q; ++n) {
        const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
        p0 = p1;
        p1 = p2;
    }
    p = p1;
    dp = q * (x * p1 - p0) / (x * x - 1.0);
}

GaussRule make_gauss(int q) {
    if (q < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    GaussRule r;
    r.nodes.resize(q);
    r.weights.resize(q);
    for (int i = 0; i < q; ++i) {
        // Chebyshev-based initial guess, then Newton on P_q.
        double x = std::cos(M_PI * (i + 0.75) / (q + 0.5));
        double p = 0.0, dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            legendre_eval(q, x, p, dp);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        legendre_eval(q, x, p, dp);
        r.nodes[i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    // Newton above walks from the largest root down; store ascending.
    std::reverse(r.nodes.begin(), r.nodes.end());
    std::reverse(r.weights.begin(), r.weights.end());
    return r;
}

} // namespace

const GaussRule& gauss_legendre(int q) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(q);
    if (it == cache.end()) it = cache.emplace(q, make_gauss(q)).first;
    return it->second;
}

double integrate_panel(const std::function<double(double)>& f, double a, double b, int q) {
    const GaussRule& g = gauss_legendre(q);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < q; ++i) s += g.weights[i] * f(mid + half * g.nodes[i]);
    return s * half;
}

std::vector<double> piece_boundaries(double a, double b,
                                     const std::vector<double>& breakpoints,
                                     int min_pieces) {
    std::vector<double> cuts;
    cuts.push_back(a);
    for (double v : breakpoints)
        if (v > a + 1e-14 && v < b - 1e-14) cuts.push_back(v);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double u, double v) { return std::abs(u - v) < 1e-14; }),
               cuts.end());

    if (min_pieces <= 1) return cuts;

    // Uniform refinement: target piece length (b-a)/min_pieces.
    const double target = (b - a) / min_pieces;
    std::vector<double> refined;
    refined.push_back(cuts.front());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        const int parts = std::max(1, static_cast<int>(std::ceil((hi - lo) / target - 1e-12)));
        for (int p = 1; p < parts; ++p) refined.push_back(lo + (hi - lo) * p / parts);
        refined.push_back(hi);
    }
    return refined;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureRule& rule,
                 const std::vector<double>& breakpoints,
                 int min_pieces) {
    if (!(b > a)) return 0.0;
    const std::vector<double> cuts =
        piece_boundaries(a, b, rule.split_at_breakpoints ? breakpoints : std::vector<double>{},
                         min_pieces);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        s += integrate_panel(f, cuts[i], cuts[i + 1], rule.order);
    return s;
}

namespace {

double simpson(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(fa, flm, fm, a, m);
    const double right = simpson(fm, frm, fb, m, b);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = simpson(fa, fm, fb, a, b);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

} // namespace nlwave
