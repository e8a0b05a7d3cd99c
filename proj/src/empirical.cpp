#include "kesten/empirical.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "kesten/errors.hpp"

namespace kesten {

LogHistogram::LogHistogram(double lo, int bins_per_decade, std::size_t n_bins)
    : bins_per_decade_(bins_per_decade), counts_(n_bins, 0) {
    if (!(lo > 0.0) || !std::isfinite(lo)) {
        throw ConfigError("histogram lower edge must be positive and finite");
    }
    if (bins_per_decade < 1) {
        throw ConfigError("bins_per_decade must be at least 1");
    }
    if (n_bins == 0) {
        throw ConfigError("histogram needs at least one bin");
    }
    edges_.resize(n_bins + 1);
    for (std::size_t k = 0; k <= n_bins; ++k) {
        edges_[k] = lo * std::pow(10.0, static_cast<double>(k) / bins_per_decade);
    }
}

LogHistogram LogHistogram::from_counts(double lo, int bins_per_decade,
                                       std::span<const std::uint64_t> counts) {
    LogHistogram h(lo, bins_per_decade, counts.size());
    std::copy(counts.begin(), counts.end(), h.counts_.begin());
    for (std::uint64_t c : counts) {
        h.total_ += c;
    }
    return h;
}

std::ptrdiff_t LogHistogram::bin_of(double x) const {
    if (!(x >= edges_.front()) || !(x <= edges_.back())) {
        return -1;
    }
    const auto n = static_cast<std::ptrdiff_t>(counts_.size());
    auto k = static_cast<std::ptrdiff_t>(std::floor(std::log10(x / edges_.front()) * bins_per_decade_));
    k = std::clamp<std::ptrdiff_t>(k, 0, n - 1);
    // The logarithm may land one bin off near an edge; settle against the stored edges.
    while (k > 0 && x < edges_[static_cast<std::size_t>(k)]) --k;
    while (k < n - 1 && x >= edges_[static_cast<std::size_t>(k) + 1]) ++k;
    return k;
}

bool LogHistogram::add(double x) {
    const std::ptrdiff_t k = bin_of(x);
    if (k < 0) {
        ++excluded_;
        return false;
    }
    ++counts_[static_cast<std::size_t>(k)];
    ++total_;
    return true;
}

void LogHistogram::merge(const LogHistogram& other) {
    if (other.edges_ != edges_) {
        throw ConfigError("cannot merge histograms over different bin grids");
    }
    for (std::size_t k = 0; k < counts_.size(); ++k) {
        counts_[k] += other.counts_[k];
    }
    total_ += other.total_;
    excluded_ += other.excluded_;
}

double LogHistogram::geometric_center(std::size_t k) const {
    return std::sqrt(edges_[k] * edges_[k + 1]);
}

double LogHistogram::density(std::size_t k) const {
    if (total_ == 0) {
        return 0.0;
    }
    return static_cast<double>(counts_[k]) / (static_cast<double>(total_) * width(k));
}

std::vector<double> LogHistogram::densities() const {
    std::vector<double> d(counts_.size());
    for (std::size_t k = 0; k < d.size(); ++k) {
        d[k] = density(k);
    }
    return d;
}

LogHistogram log_binned_histogram(std::span<const double> samples, int bins_per_decade) {
    if (bins_per_decade < 1) {
        throw ConfigError("bins_per_decade must be at least 1");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    std::uint64_t excluded = 0;
    for (double x : samples) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            ++excluded;
            continue;
        }
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (!(hi > 0.0)) {
        throw EstimationError("log_binned_histogram: no positive finite samples (" +
                              std::to_string(excluded) + " excluded)");
    }
    auto n_bins = static_cast<std::size_t>(std::floor(std::log10(hi / lo) * bins_per_decade)) + 1;
    while (lo * std::pow(10.0, static_cast<double>(n_bins) / bins_per_decade) < hi) {
        ++n_bins;
    }
    LogHistogram h(lo, bins_per_decade, n_bins);
    for (double x : samples) {
        if (x > 0.0 && std::isfinite(x)) {
            h.add(x);
        }
    }
    h.add_excluded(excluded);
    return h;
}

double most_probable_value(const LogHistogram& hist) {
    if (hist.total() == 0) {
        throw EstimationError("most_probable_value: empty histogram");
    }
    const std::vector<double> d = hist.densities();
    const std::size_t n = d.size();
    // Equal counts on log bins are flat in log x; the density then only falls
    // with x and the maximum would be an artifact of the lowest edge.
    const auto& c = hist.counts();
    if (n > 1 && std::all_of(c.begin(), c.end(), [&](std::uint64_t v) { return v == c.front(); })) {
        throw EstimationError("most_probable_value: flat histogram has no mode");
    }
    const auto peak = static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
    const double center = hist.geometric_center(peak);
    if (peak == 0 || peak + 1 == n || d[peak - 1] <= 0.0 || d[peak + 1] <= 0.0) {
        return center;
    }
    const double y_left = std::log(d[peak - 1]);
    const double y_mid = std::log(d[peak]);
    const double y_right = std::log(d[peak + 1]);
    const double curvature = y_left - 2.0 * y_mid + y_right;
    if (!(curvature < 0.0)) {
        return center;
    }
    // Offset of the vertex in units of the (constant) log-bin width.
    const double offset = std::clamp(0.5 * (y_left - y_right) / curvature, -0.5, 0.5);
    const double log_width = std::log(10.0) / hist.bins_per_decade();
    return center * std::exp(offset * log_width);
}

ModeEstimate average_mode(std::span<const std::vector<double>> runs, int bins_per_decade) {
    if (runs.empty()) {
        throw ConfigError("average_mode needs at least one run");
    }
    ModeEstimate est;
    std::vector<double> modes;
    for (const auto& run : runs) {
        try {
            modes.push_back(most_probable_value(log_binned_histogram(run, bins_per_decade)));
        } catch (const EstimationError&) {
            ++est.n_failed;
        }
    }
    if (modes.empty()) {
        throw EstimationError("average_mode: every run failed to produce a mode");
    }
    est.n_runs = modes.size();
    double sum = 0.0;
    for (double m : modes) sum += m;
    est.x_mp = sum / static_cast<double>(modes.size());
    if (modes.size() > 1) {
        double ss = 0.0;
        for (double m : modes) ss += (m - est.x_mp) * (m - est.x_mp);
        est.spread = std::sqrt(ss / static_cast<double>(modes.size() - 1));
    }
    return est;
}

TailFit fit_tail_exponent(std::span<const double> samples, double x_min) {
    if (!(x_min > 0.0)) {
        throw ConfigError("fit_tail_exponent: x_min must be positive");
    }
    double sum_log = 0.0;
    std::size_t n = 0;
    for (double x : samples) {
        if (x > x_min && std::isfinite(x)) {
            sum_log += std::log(x / x_min);
            ++n;
        }
    }
    if (n < kMinTailSamples) {
        throw EstimationError("fit_tail_exponent: " + std::to_string(n) +
                              " samples above x_min, need " + std::to_string(kMinTailSamples));
    }
    TailFit fit;
    fit.x_min = x_min;
    fit.n_tail = n;
    fit.mu_hat = static_cast<double>(n) / sum_log;
    fit.standard_error = fit.mu_hat / std::sqrt(static_cast<double>(n));
    return fit;
}

ScalingFit fit_scaling_prefactor(std::span<const ScalingPoint> points) {
    if (points.size() < 3) {
        throw ConfigError("fit_scaling_prefactor needs at least 3 points");
    }
    std::vector<double> u(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (!(p.q0 > 0.0)) {
            throw ConfigError("fit_scaling_prefactor: q0 must be positive");
        }
        u[i] = p.a / (p.q0 * p.q0);
    }
    if (std::all_of(u.begin(), u.end(), [&](double v) { return v == u.front(); })) {
        throw ConfigError("fit_scaling_prefactor: all a/q0^2 equal, slope undetermined");
    }
    double suu = 0.0;
    double suy = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        suu += u[i] * u[i];
        suy += u[i] * points[i].x_mp;
    }
    ScalingFit fit;
    fit.n_points = points.size();
    fit.c = suy / suu;
    double rss = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double e = points[i].x_mp - fit.c * u[i];
        rss += e * e;
    }
    fit.standard_error = std::sqrt(rss / static_cast<double>(u.size() - 1) / suu);
    return fit;
}

}  // namespace kesten
