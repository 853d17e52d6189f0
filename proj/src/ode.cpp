#include "npsa/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace npsa {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double C2 = 1.0 / 5.0, C3 = 3.0 / 10.0, C4 = 4.0 / 5.0, C5 = 8.0 / 9.0;
constexpr double A21 = 1.0 / 5.0;
constexpr double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0;
constexpr double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0;
constexpr double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0, A53 = 64448.0 / 6561.0,
                 A54 = -212.0 / 729.0;
constexpr double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0,
                 A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0;
constexpr double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0,
                 B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0;
// embedded error coefficients (5th minus 4th order solution)
constexpr double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0,
                 E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0;
// dense-output coefficients for the 4th-order continuous extension
constexpr double D1 = -12715105075.0 / 11282082432.0, D3 = 87487479700.0 / 32700410799.0,
                 D4 = -10690763975.0 / 1880347072.0, D5 = 701980252875.0 / 199316789632.0,
                 D6 = -1453857185.0 / 822651844.0, D7 = 69997945.0 / 29380423.0;

// step-size controller constants (PI control with beta = 0.04)
constexpr double SAFE = 0.9, BETA = 0.04, EXPO1 = 0.2 - BETA * 0.75;
constexpr double FAC_MIN = 0.2, FAC_MAX = 10.0;

struct Workspace {
    std::size_t dim;
    std::vector<double> k1, k2, k3, k4, k5, k6, k7, y_stage, y_next;
    explicit Workspace(std::size_t d)
        : dim(d), k1(d), k2(d), k3(d), k4(d), k5(d), k6(d), k7(d), y_stage(d), y_next(d) {}
};

void check_finite(std::span<const double> v, double t) {
    for (double x : v) {
        if (!std::isfinite(x)) throw SolverError("ode: non-finite right-hand side", t);
    }
}

// One 5(4) step from (t, y) with width h. k1 must hold f(t, y) on entry;
// on exit k7 holds f(t + h, y_next) (FSAL). Returns the scaled error norm.
double dopri_step(const OdeRhs& rhs, double t, std::span<const double> y, double h, Workspace& w,
                  double t_lo, double t_hi, double rtol, double atol) {
    const std::size_t d = w.dim;
    auto clamp_t = [&](double tq) { return std::clamp(tq, t_lo, t_hi); };

    for (std::size_t i = 0; i < d; ++i) w.y_stage[i] = y[i] + h * A21 * w.k1[i];
    rhs(clamp_t(t + C2 * h), w.y_stage, w.k2);
    for (std::size_t i = 0; i < d; ++i)
        w.y_stage[i] = y[i] + h * (A31 * w.k1[i] + A32 * w.k2[i]);
    rhs(clamp_t(t + C3 * h), w.y_stage, w.k3);
    for (std::size_t i = 0; i < d; ++i)
        w.y_stage[i] = y[i] + h * (A41 * w.k1[i] + A42 * w.k2[i] + A43 * w.k3[i]);
    rhs(clamp_t(t + C4 * h), w.y_stage, w.k4);
    for (std::size_t i = 0; i < d; ++i)
        w.y_stage[i] = y[i] + h * (A51 * w.k1[i] + A52 * w.k2[i] + A53 * w.k3[i] + A54 * w.k4[i]);
    rhs(clamp_t(t + C5 * h), w.y_stage, w.k5);
    for (std::size_t i = 0; i < d; ++i)
        w.y_stage[i] = y[i] + h * (A61 * w.k1[i] + A62 * w.k2[i] + A63 * w.k3[i] + A64 * w.k4[i] +
                                   A65 * w.k5[i]);
    rhs(clamp_t(t + h), w.y_stage, w.k6);
    for (std::size_t i = 0; i < d; ++i)
        w.y_next[i] = y[i] + h * (B1 * w.k1[i] + B3 * w.k3[i] + B4 * w.k4[i] + B5 * w.k5[i] +
                                  B6 * w.k6[i]);
    rhs(clamp_t(t + h), w.y_next, w.k7);
    check_finite(w.k7, t + h);

    double err_sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        double e = h * (E1 * w.k1[i] + E3 * w.k3[i] + E4 * w.k4[i] + E5 * w.k5[i] +
                        E6 * w.k6[i] + E7 * w.k7[i]);
        double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(w.y_next[i]));
        err_sq += (e / sc) * (e / sc);
    }
    return std::sqrt(err_sq / static_cast<double>(d));
}

double initial_step_guess(const OdeRhs& rhs, double t0, std::span<const double> y0,
                          std::span<const double> f0, double t_end, double rtol, double atol) {
    const std::size_t d = y0.size();
    const double h_max = t_end - t0;
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        double sc = atol + rtol * std::abs(y0[i]);
        dnf += (f0[i] / sc) * (f0[i] / sc);
        dny += (y0[i] / sc) * (y0[i] / sc);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
    h = std::min(h, h_max);

    std::vector<double> y1(d), f1(d);
    for (std::size_t i = 0; i < d; ++i) y1[i] = y0[i] + h * f0[i];
    rhs(std::min(t0 + h, t_end), y1, f1);

    double der2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        double sc = atol + rtol * std::abs(y0[i]);
        der2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc);
    }
    der2 = std::sqrt(der2) / h;

    double der12 = std::max(der2, std::sqrt(dnf));
    double h1 = (der12 <= 1e-15) ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::min({100.0 * h, h1, h_max});
}

}  // namespace

std::size_t DenseSolution::segment_index(double t) const {
    auto it = std::upper_bound(mesh_.begin(), mesh_.end(), t);
    std::size_t idx = static_cast<std::size_t>(it - mesh_.begin());
    if (idx == 0) return 0;
    return std::min(idx - 1, mesh_.size() - 2);
}

void DenseSolution::eval(double t, std::span<double> out) const {
    t = std::clamp(t, mesh_.front(), mesh_.back());
    std::size_t seg = segment_index(t);
    double h = mesh_[seg + 1] - mesh_[seg];
    double theta = (t - mesh_[seg]) / h;
    double theta1 = 1.0 - theta;
    const double* c = coeffs_.data() + 5 * dim_ * seg;
    for (std::size_t i = 0; i < dim_; ++i) {
        out[i] = c[i] + theta * (c[dim_ + i] +
                                 theta1 * (c[2 * dim_ + i] +
                                           theta * (c[3 * dim_ + i] + theta1 * c[4 * dim_ + i])));
    }
}

std::vector<double> DenseSolution::eval(double t) const {
    std::vector<double> out(dim_);
    eval(t, out);
    return out;
}

double DenseSolution::eval_scalar(double t) const {
    double out;
    eval(t, std::span<double>(&out, 1));
    return out;
}

std::span<const double> DenseSolution::state_at_end() const { return final_state_; }

DenseSolution solve_ivp(const OdeRhs& rhs, std::array<double, 2> t_span,
                        std::span<const double> y0, const SolverConfig& config) {
    const double t0 = t_span[0], t1 = t_span[1];
    if (!(t1 > t0)) throw std::invalid_argument("solve_ivp: t_span must satisfy t0 < t1");
    if (!(config.rtol > 0.0) || !(config.atol > 0.0)) {
        throw std::invalid_argument("solve_ivp: tolerances must be > 0");
    }
    const std::size_t d = y0.size();

    DenseSolution sol;
    sol.dim_ = d;
    sol.mesh_.push_back(t0);

    Workspace w(d);
    std::vector<double> y(y0.begin(), y0.end());
    double t = t0;
    rhs(t0, y, w.k1);
    check_finite(w.k1, t0);

    const double h_min_floor =
        config.min_step > 0.0
            ? config.min_step
            : 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t0), std::abs(t1));
    double h = config.initial_step > 0.0
                   ? std::min(config.initial_step, t1 - t0)
                   : initial_step_guess(rhs, t0, y, w.k1, t1, config.rtol, config.atol);

    double fac_old = 1e-4;
    bool rejected = false;
    for (std::size_t step = 0; t < t1; ++step) {
        if (step >= config.max_steps) throw SolverError("ode: max step count exceeded", t);
        bool last = t + h >= t1;
        if (last) h = t1 - t;
        if (h < h_min_floor && !last) throw SolverError("ode: step size underflow", t);

        double err = dopri_step(rhs, t, y, h, w, t0, t1, config.rtol, config.atol);

        double fac11 = std::pow(err, EXPO1);
        if (err <= 1.0) {
            // accept: store the dense coefficients of this step
            double* c = nullptr;
            {
                std::size_t base = sol.coeffs_.size();
                sol.coeffs_.resize(base + 5 * d);
                c = sol.coeffs_.data() + base;
            }
            for (std::size_t i = 0; i < d; ++i) {
                double ydiff = w.y_next[i] - y[i];
                double bspl = h * w.k1[i] - ydiff;
                c[i] = y[i];
                c[d + i] = ydiff;
                c[2 * d + i] = bspl;
                c[3 * d + i] = ydiff - h * w.k7[i] - bspl;
                c[4 * d + i] = h * (D1 * w.k1[i] + D3 * w.k3[i] + D4 * w.k4[i] + D5 * w.k5[i] +
                                    D6 * w.k6[i] + D7 * w.k7[i]);
            }
            t = last ? t1 : t + h;
            sol.mesh_.push_back(t);
            y = w.y_next;
            w.k1.swap(w.k7);  // FSAL

            double fac = fac11 / std::pow(fac_old, BETA);  // PI: previous accepted error
            fac = std::max(1.0 / FAC_MAX, std::min(1.0 / FAC_MIN, fac / SAFE));
            fac_old = std::max(err, 1e-4);
            double h_new = h / fac;
            if (rejected) h_new = std::min(h_new, h);
            rejected = false;
            h = h_new;
        } else {
            rejected = true;
            h = h / std::min(1.0 / FAC_MIN, fac11 / SAFE);
            if (h < h_min_floor) throw SolverError("ode: step size underflow", t);
        }
    }
    sol.final_state_ = y;
    return sol;
}

std::vector<double> fixed_step_solve(const OdeRhs& rhs, std::array<double, 2> t_span,
                                     std::span<const double> y0, std::size_t n_steps) {
    const double t0 = t_span[0], t1 = t_span[1];
    if (!(t1 > t0)) throw std::invalid_argument("fixed_step_solve: t_span must satisfy t0 < t1");
    if (n_steps == 0) throw std::invalid_argument("fixed_step_solve: n_steps must be >= 1");
    const std::size_t d = y0.size();
    const double h = (t1 - t0) / static_cast<double>(n_steps);

    Workspace w(d);
    std::vector<double> y(y0.begin(), y0.end());
    double t = t0;
    rhs(t, y, w.k1);
    for (std::size_t s = 0; s < n_steps; ++s) {
        dopri_step(rhs, t, y, h, w, t0, t1, 1.0, 1.0);
        y = w.y_next;
        w.k1.swap(w.k7);
        t = t0 + static_cast<double>(s + 1) * h;
    }
    return y;
}

}  // namespace npsa
