#include "nlwave/micromodulus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nlwave {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

std::vector<double> sorted_unique(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-13; }),
            v.end());
    return v;
}

std::vector<double> interior(std::vector<double> v) {
    v.erase(std::remove_if(v.begin(), v.end(),
                           [](double x) { return x <= -1.0 + 1e-13 || x >= 1.0 - 1e-13; }),
            v.end());
    return sorted_unique(std::move(v));
}

bool check_even(const std::function<double(double)>& f) {
    for (int i = 0; i < 64; ++i) {
        const double x = (i + 0.5) / 64.0;
        if (std::abs(f(x) - f(-x)) >= 1e-12) return false;
    }
    return true;
}

} // namespace

Micromodulus make_micromodulus(std::function<double(double)> evaluator,
                               std::vector<double> breakpoints,
                               std::string name) {
    Micromodulus c;
    c.evaluator = std::move(evaluator);
    c.breakpoints = interior(std::move(breakpoints));
    c.is_even = check_even(c.evaluator);
    c.name = std::move(name);
    const auto& f = c.evaluator;
    c.l2_norm = std::sqrt(std::max(
        0.0, integrate([&f](double x) { return f(x) * f(x); }, -1.0, 1.0,
                       QuadratureRule{}, c.breakpoints)));
    return c;
}

Micromodulus unit_box() { return scaled_box(1.0); }

Micromodulus scaled_box(double width) {
    if (!(width > 0.0) || width > 2.0)
        throw std::invalid_argument("box kernel width must lie in (0, 2]");
    const double h = 0.5 * width;
    auto f = [h](double x) { return std::abs(x) <= h ? 1.0 : 0.0; };
    std::ostringstream name;
    name << "box:" << width;
    return make_micromodulus(f, {-h, h}, name.str());
}

Micromodulus truncated_gaussian(double sigma, double width) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian kernel needs sigma > 0");
    if (!(width > 0.0) || width > 2.0)
        throw std::invalid_argument("gaussian kernel width must lie in (0, 2]");
    const double h = 0.5 * width;
    const double s2 = 2.0 * sigma * sigma;
    auto f = [h, s2](double x) { return std::abs(x) <= h ? std::exp(-x * x / s2) : 0.0; };
    std::ostringstream name;
    name << "gauss:" << sigma << ":" << width;
    return make_micromodulus(f, {-h, h}, name.str());
}

Micromodulus zero_kernel() {
    return make_micromodulus([](double) { return 0.0; }, {}, "zero");
}

Micromodulus kernel_from_samples(std::vector<std::pair<double, double>> samples,
                                 std::string name) {
    if (samples.size() < 2)
        throw std::invalid_argument("sampled kernel needs at least two points");
    std::sort(samples.begin(), samples.end());
    for (std::size_t i = 0; i + 1 < samples.size(); ++i)
        if (samples[i + 1].first - samples[i].first < 1e-13)
            throw std::invalid_argument("sampled kernel has duplicate x values");

    const bool radial = samples.front().first >= 0.0;
    auto interp = [samples](double x) -> double {
        if (x < samples.front().first || x > samples.back().first) return 0.0;
        auto it = std::lower_bound(samples.begin(), samples.end(), x,
                                   [](const std::pair<double, double>& s, double v) {
                                       return s.first < v;
                                   });
        if (it == samples.begin()) return it->second;
        const auto hi = it;
        const auto lo = it - 1;
        const double t = (x - lo->first) / (hi->first - lo->first);
        return lo->second + t * (hi->second - lo->second);
    };

    std::function<double(double)> f;
    std::vector<double> bps;
    if (radial) {
        f = [interp](double x) { return interp(std::abs(x)); };
        for (const auto& s : samples) {
            bps.push_back(s.first);
            bps.push_back(-s.first);
        }
    } else {
        f = interp;
        for (const auto& s : samples) bps.push_back(s.first);
    }
    return make_micromodulus(std::move(f), std::move(bps), std::move(name));
}

Micromodulus kernel_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open kernel file '" + path + "'");
    std::vector<std::pair<double, double>> samples;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double x = 0.0, v = 0.0;
        if (!(ls >> x >> v))
            throw std::invalid_argument("malformed kernel row at " + path + ":" +
                                        std::to_string(lineno));
        samples.emplace_back(x, v);
    }
    return kernel_from_samples(std::move(samples), "csv:" + path);
}

Micromodulus kernel_from_selector(const std::string& selector) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : selector) {
        if (ch == ':' && parts.size() < 2) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);
    const std::string& head = parts[0];

    auto num = [&selector](const std::string& s) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad number '" + s + "' in kernel selector '" + selector + "'");
        }
        if (pos != s.size())
            throw std::invalid_argument("bad number '" + s + "' in kernel selector '" + selector + "'");
        return v;
    };

    if (head == "unitbox") {
        if (parts.size() != 1)
            throw std::invalid_argument("unitbox takes no parameters (got '" + selector + "')");
        return unit_box();
    }
    if (head == "zero") {
        if (parts.size() != 1)
            throw std::invalid_argument("zero takes no parameters (got '" + selector + "')");
        return zero_kernel();
    }
    if (head == "box") {
        if (parts.size() != 2)
            throw std::invalid_argument("box selector must be box:<width> (got '" + selector + "')");
        return scaled_box(num(parts[1]));
    }
    if (head == "gauss") {
        if (parts.size() == 2) return truncated_gaussian(num(parts[1]));
        if (parts.size() == 3) return truncated_gaussian(num(parts[1]), num(parts[2]));
        throw std::invalid_argument("gauss selector must be gauss:<sigma>[:<width>] (got '" +
                                    selector + "')");
    }
    if (head == "csv") {
        // Everything after "csv:" is the path; it may itself contain colons.
        if (selector.size() <= 4)
            throw std::invalid_argument("csv selector must be csv:<path>");
        return kernel_from_csv(selector.substr(4));
    }
    throw std::invalid_argument(
        "unknown kernel '" + selector +
        "' (expected unitbox, box:<width>, gauss:<sigma>[:<width>], zero, or csv:<path>)");
}

double kernel_integral(const Micromodulus& c) {
    return integrate(c.evaluator, -1.0, 1.0, QuadratureRule{}, c.breakpoints);
}

double silling_constant(const Micromodulus& c, BoundaryCondition bc) {
    const double total = kernel_integral(c);
    switch (bc) {
        case BoundaryCondition::Periodic:
        case BoundaryCondition::Antiperiodic:
            return total / kSqrt2;
        case BoundaryCondition::Neumann:
        case BoundaryCondition::Dirichlet:
            return total;
    }
    return total;
}

std::vector<double> ExtendedKernel::breakpoints_in(double lo, double hi) const {
    std::vector<double> out;
    const int m_lo = static_cast<int>(std::floor((lo + 1.0) / 2.0)) - 1;
    const int m_hi = static_cast<int>(std::ceil((hi + 1.0) / 2.0)) + 1;
    for (int m = m_lo; m <= m_hi; ++m)
        for (double b : base_breakpoints) {
            const double x = b + 2.0 * m;
            if (x > lo + 1e-13 && x < hi - 1e-13) out.push_back(x);
        }
    return sorted_unique(std::move(out));
}

ExtendedKernel extend(const Micromodulus& c, ExtensionMode mode) {
    ExtendedKernel ek;
    ek.mode = mode;
    const auto f = c.evaluator;
    const bool anti = (mode == ExtensionMode::Antiperiodic2);
    ek.evaluator = [f, anti](double x) {
        const int shifts = static_cast<int>(std::floor((x + 1.0) / 2.0));
        const double t = x - 2.0 * shifts;
        const double sign = (anti && (shifts % 2 != 0)) ? -1.0 : 1.0;
        return sign * f(t);
    };
    ek.base_breakpoints = c.breakpoints;
    ek.base_breakpoints.push_back(-1.0);
    ek.base_breakpoints.push_back(1.0);
    ek.base_breakpoints = sorted_unique(std::move(ek.base_breakpoints));
    return ek;
}

HalfWaveSplit half_wave_split(const Micromodulus& c) {
    if (!c.is_even)
        throw std::domain_error("half-wave split requires an even kernel");
    const auto f = c.evaluator;
    auto c1_eval = [f](double x) {
        const double ax = std::abs(x);
        return 0.5 * (f(ax) + f(1.0 - ax));
    };
    auto c2_eval = [f](double x) {
        const double ax = std::abs(x);
        return 0.5 * (f(ax) - f(1.0 - ax));
    };
    std::vector<double> bps{0.0};
    for (double b : c.breakpoints) {
        bps.push_back(b);
        bps.push_back(-b);
        bps.push_back(1.0 - std::abs(b));
        bps.push_back(std::abs(b) - 1.0);
    }
    HalfWaveSplit split;
    split.c1 = make_micromodulus(c1_eval, bps, c.name + "|half1");
    split.c2 = make_micromodulus(c2_eval, bps, c.name + "|half2");
    const double i1 = kernel_integral(split.c1);
    const double i2 = kernel_integral(split.c2);
    split.k_n = -0.5 * (kSqrt2 - 1.0) * i1 + 0.5 * (kSqrt2 + 1.0) * i2;
    return split;
}

std::function<double(double)> parity_project(std::function<double(double)> u, Parity parity) {
    const double sign = (parity == Parity::Even) ? 1.0 : -1.0;
    return [u = std::move(u), sign](double x) { return 0.5 * (u(x) + sign * u(-x)); };
}

} // namespace nlwave
