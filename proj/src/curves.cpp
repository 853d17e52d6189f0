#include "npsa/curves.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace npsa {

CriticalCurveSet derive_critical_curves(const IntensityFunction& intensity,
                                        const std::function<double(double)>& mean_shortage, int n,
                                        const SolverConfig& config, std::string intensity_desc,
                                        std::string shortage_desc) {
    if (n < 1) throw std::invalid_argument("derive_critical_curves: need n >= 1 workers");
    const double horizon = intensity.horizon();
    const double phi_at_zero = mean_shortage(0.0);
    if (!std::isfinite(phi_at_zero) || phi_at_zero < 0.0) {
        throw std::invalid_argument("derive_critical_curves: mean shortage must be finite and >= 0 at 0");
    }
    // continuation below 0 with slope -1 keeps trial stages well defined
    auto phi = [&](double y) { return y >= 0.0 ? mean_shortage(y) : phi_at_zero - y; };

    CriticalCurveSet set;
    set.horizon_ = horizon;
    set.intensity_desc_ = std::move(intensity_desc);
    set.shortage_desc_ = std::move(shortage_desc);
    set.solutions_.reserve(static_cast<std::size_t>(n));

    const double y_terminal = 0.0;
    for (int k = 1; k <= n; ++k) {
        const DenseSolution* prev = k == 1 ? nullptr : &set.solutions_.back();
        OdeRhs rhs = [&](double s, std::span<const double> y, std::span<double> dy) {
            double rate = intensity.rate_at(horizon - s);
            double phi_prev = prev == nullptr ? 0.0 : phi(prev->eval_scalar(s));
            dy[0] = rate * (phi(y[0]) - phi_prev);
        };
        try {
            set.solutions_.push_back(
                solve_ivp(rhs, {0.0, horizon}, std::span<const double>(&y_terminal, 1), config));
        } catch (const SolverError& err) {
            throw SolverError("derive_critical_curves: curve " + std::to_string(k) +
                                  " failed: " + err.what(),
                              err.t);
        }
    }
    return set;
}

RewardModel make_reward_model(const ValueDistribution& dist) {
    return RewardModel{[dist](double y) { return phi_exact(dist, y); },
                       [dist](double y) { return survival(dist, y); }};
}

RewardModel make_reward_model(const MeanShortageCache& cache) {
    return RewardModel{[&cache](double y) { return cache(y); },
                       [&cache](double y) { return 1.0 - cache.ecdf(y); }};
}

SampledCurveSet::SampledCurveSet(std::vector<double> grid, std::vector<std::vector<double>> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (grid_.size() < 2) throw std::invalid_argument("SampledCurveSet: need at least two grid points");
    for (std::size_t i = 1; i < grid_.size(); ++i) {
        if (!(grid_[i] > grid_[i - 1])) {
            throw std::invalid_argument("SampledCurveSet: grid must be strictly increasing");
        }
    }
    if (values_.empty()) throw std::invalid_argument("SampledCurveSet: need at least one curve");
    for (const auto& row : values_) {
        if (row.size() != grid_.size()) {
            throw std::invalid_argument("SampledCurveSet: curve length must match grid");
        }
    }
}

double SampledCurveSet::threshold(int worker, double t) const {
    t = std::clamp(t, grid_.front(), grid_.back());
    auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - grid_.begin());
    if (i > 0) --i;
    return values_[static_cast<std::size_t>(worker - 1)][i];
}

void write_curves_csv(const std::string& path, const SampledCurveSet& curves) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write curves CSV: " + path);
    out << "t";
    for (int k = 1; k <= curves.num_workers(); ++k) out << ",y_" << k;
    out << "\n";
    char buf[64];
    for (std::size_t i = 0; i < curves.grid().size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", curves.grid()[i]);
        out << buf;
        for (const auto& row : curves.values()) {
            std::snprintf(buf, sizeof(buf), ",%.17g", row[i]);
            out << buf;
        }
        out << "\n";
    }
}

SampledCurveSet read_curves_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open curves CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("curves CSV: empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t n_cols = 1 + static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
    if (n_cols < 2 || line.rfind("t,y_1", 0) != 0) {
        throw std::invalid_argument("curves CSV: expected header t,y_1,...: " + path);
    }

    std::vector<double> grid;
    std::vector<std::vector<double>> values(n_cols - 1);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::size_t col = 0;
        while (std::getline(ss, field, ',')) {
            double v = std::stod(field);
            if (col == 0) {
                grid.push_back(v);
            } else if (col < n_cols) {
                values[col - 1].push_back(v);
            }
            ++col;
        }
        if (col != n_cols) throw std::invalid_argument("curves CSV: ragged row in " + path);
    }
    return SampledCurveSet(std::move(grid), std::move(values));
}

}  // namespace npsa
