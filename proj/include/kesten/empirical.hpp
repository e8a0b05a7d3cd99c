#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace kesten {

// Histogram over geometrically spaced bins: edge[k] = lo * 10^(k / bins_per_decade).
class LogHistogram {
public:
    LogHistogram(double lo, int bins_per_decade, std::size_t n_bins);

    // Builds a histogram from explicit counts over the grid starting at lo.
    static LogHistogram from_counts(double lo, int bins_per_decade,
                                    std::span<const std::uint64_t> counts);

    // Index of the bin holding x, or -1 outside the grid. The last bin is closed.
    std::ptrdiff_t bin_of(double x) const;
    bool add(double x);
    // Bin-wise count addition; the grids must be identical.
    void merge(const LogHistogram& other);

    int bins_per_decade() const noexcept { return bins_per_decade_; }
    std::size_t size() const noexcept { return counts_.size(); }
    const std::vector<double>& edges() const noexcept { return edges_; }
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    std::uint64_t total() const noexcept { return total_; }
    // Samples that could not be binned (non-positive or non-finite).
    std::uint64_t excluded() const noexcept { return excluded_; }
    void add_excluded(std::uint64_t n) noexcept { excluded_ += n; }

    double width(std::size_t k) const { return edges_[k + 1] - edges_[k]; }
    double geometric_center(std::size_t k) const;
    // count / (total * width); integrates to one over the bins.
    double density(std::size_t k) const;
    std::vector<double> densities() const;

private:
    int bins_per_decade_;
    std::vector<double> edges_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
    std::uint64_t excluded_ = 0;
};

// Spans [min sample, max sample]. Non-positive or non-finite samples are
// skipped and counted in excluded(); throws EstimationError if nothing is left.
LogHistogram log_binned_histogram(std::span<const double> samples, int bins_per_decade = 10);

// Abscissa of the density maximum, refined by a parabola through the peak bin
// and its neighbours in (log x, log density). Falls back to the peak bin's
// geometric centre when the peak touches the grid boundary or an empty bin.
// Throws EstimationError when every bin holds the same count.
double most_probable_value(const LogHistogram& hist);

struct ModeEstimate {
    double x_mp = 0.0;
    double spread = 0.0;  // sample standard deviation across runs
    std::size_t n_runs = 0;
    std::size_t n_failed = 0;
};

// Per-run mode, then mean and spread across the runs that produced one.
ModeEstimate average_mode(std::span<const std::vector<double>> runs, int bins_per_decade = 10);

struct TailFit {
    double mu_hat = 0.0;
    double x_min = 0.0;
    std::size_t n_tail = 0;
    double standard_error = 0.0;
};

inline constexpr std::size_t kMinTailSamples = 50;

// Hill (maximum-likelihood) estimate over samples strictly above x_min:
// mu = n / sum log(x_i / x_min), standard error mu / sqrt(n). The density
// then decays as x^-(1 + mu).
TailFit fit_tail_exponent(std::span<const double> samples, double x_min);

struct ScalingPoint {
    double a = 0.0;
    double q0 = 0.0;
    double x_mp = 0.0;
};

struct ScalingFit {
    double c = 0.0;
    double standard_error = 0.0;
    std::size_t n_points = 0;
};

// Least-squares slope through the origin of x_mp against a / q0^2.
ScalingFit fit_scaling_prefactor(std::span<const ScalingPoint> points);

// Supremum distance between the empirical CDF of `samples` and `cdf`.
template <class Cdf>
double ks_distance(std::vector<double> samples, Cdf&& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, std::abs(static_cast<double>(i + 1) / n - f),
                      std::abs(f - static_cast<double>(i) / n)});
    }
    return d;
}

}  // namespace kesten
