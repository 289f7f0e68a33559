#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace bhpc {

/// Pairwise (cascade) summation of terms[begin, end). The reduction tree is a
/// pure function of the index range, so results are bitwise reproducible for a
/// fixed term order regardless of thread count upstream.
template <typename F>
double pairwise_sum(std::size_t begin, std::size_t end, F&& term) {
    std::size_t n = end - begin;
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += term(i);
        return s;
    }
    std::size_t mid = begin + n / 2;
    return pairwise_sum(begin, mid, term) + pairwise_sum(mid, end, term);
}

inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(0, v.size(), [&](std::size_t i) { return v[i]; });
}

struct MeanSem {
    double mean = 0.0;
    double sem = 0.0;  ///< standard error of the mean (0 for n < 2)
};

inline MeanSem mean_sem(const std::vector<double>& v) {
    MeanSem out;
    std::size_t n = v.size();
    if (n == 0) return out;
    out.mean = pairwise_sum(v) / static_cast<double>(n);
    if (n < 2) return out;
    double ss = pairwise_sum(0, n, [&](std::size_t i) {
        double d = v[i] - out.mean;
        return d * d;
    });
    out.sem = std::sqrt(ss / (static_cast<double>(n) * static_cast<double>(n - 1)));
    return out;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;  ///< coefficient of determination
};

/// Ordinary least squares y = slope*x + intercept.
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_fit: need two equal-length samples of size >= 2");
    std::size_t n = x.size();
    double xm = pairwise_sum(x) / static_cast<double>(n);
    double ym = pairwise_sum(y) / static_cast<double>(n);
    double sxx = pairwise_sum(0, n, [&](std::size_t i) { return (x[i] - xm) * (x[i] - xm); });
    double sxy = pairwise_sum(0, n, [&](std::size_t i) { return (x[i] - xm) * (y[i] - ym); });
    double syy = pairwise_sum(0, n, [&](std::size_t i) { return (y[i] - ym) * (y[i] - ym); });
    if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissa");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ym - fit.slope * xm;
    fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

}  // namespace bhpc
