#include "kesten/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace kesten {
namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
// Gauss weights for the odd-indexed Kronrod nodes (the 7-point rule).
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct Panel {
    double lo;
    double hi;
    double value;
    double error;
    int depth;

    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod(const std::function<double(double)>& f, double lo, double hi, int depth) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double k = kKronrodWeights[7] * fc;
    double g = kGaussWeights[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double pair = f(center - dx) + f(center + dx);
        k += kKronrodWeights[i] * pair;
        if (i % 2 == 1) {
            g += kGaussWeights[i / 2] * pair;
        }
    }
    return {lo, hi, k * half, std::abs((k - g) * half), depth};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureOptions& options) {
    if (lo == hi) {
        return {0.0, 0.0, true, 0};
    }
    if (lo > hi) {
        QuadratureResult r = integrate(f, hi, lo, options);
        r.value = -r.value;
        return r;
    }

    // Global adaptive strategy: always bisect the panel with the largest error.
    std::priority_queue<Panel> panels;
    panels.push(gauss_kronrod(f, lo, hi, 0));
    int evaluations = 15;
    double value = panels.top().value;
    double error = panels.top().error;

    const auto tolerance = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(value)); };

    bool converged = error <= tolerance();
    while (!converged) {
        Panel worst = panels.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (worst.depth >= options.max_depth || evaluations >= options.max_evaluations ||
            mid <= worst.lo || mid >= worst.hi) {
            break;
        }
        panels.pop();
        const Panel left = gauss_kronrod(f, worst.lo, mid, worst.depth + 1);
        const Panel right = gauss_kronrod(f, mid, worst.hi, worst.depth + 1);
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        converged = error <= tolerance();
    }

    // Re-sum to shed the drift of the running updates.
    value = 0.0;
    error = 0.0;
    std::vector<Panel> all;
    all.reserve(panels.size());
    while (!panels.empty()) {
        all.push_back(panels.top());
        panels.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
    for (const Panel& p : all) {
        value += p.value;
        error += p.error;
    }
    return {value, error, error <= tolerance(), evaluations};
}

}  // namespace kesten
