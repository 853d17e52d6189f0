#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace npsa::test {

// Adaptive Simpson quadrature; independent oracle for tail integrals.
inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Brute-force integral of the ECDF complement over [y, inf), summed
// rectangle by rectangle from the raw sample list.
inline double ecdf_tail_integral(std::vector<double> samples, double y) {
    std::sort(samples.begin(), samples.end());
    const auto n = static_cast<double>(samples.size());
    double total = 0.0;
    double left = y;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i] <= left) continue;
        double height = 1.0 - static_cast<double>(i) / n;  // 1 - F_N on (left, samples[i])
        total += (samples[i] - left) * height;
        left = samples[i];
    }
    return total;
}

inline double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    auto n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace npsa::test
