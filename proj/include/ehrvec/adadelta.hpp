#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ehr {

// Per-parameter adaptive steps from decayed accumulators of squared
// gradients and squared updates. The step direction follows the gradient's
// sign, so passing the gradient of an objective ascends it and passing the
// gradient of a loss times -1 descends it.
class Adadelta {
  public:
    Adadelta(size_t n, double rho = 0.95, double eps = 1e-6)
        : rho_(rho), eps_(eps), avg_sq_grad_(n, 0.0), avg_sq_update_(n, 0.0) {
        if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho");
        if (!(eps > 0.0)) throw std::invalid_argument("eps");
    }

    size_t size() const { return avg_sq_grad_.size(); }
    const std::vector<double>& avg_sq_grad() const { return avg_sq_grad_; }
    const std::vector<double>& avg_sq_update() const { return avg_sq_update_; }

    // Entries with exactly zero gradient are untouched: no update and no
    // accumulator decay, so sparse batches cost only their support.
    void step(std::vector<double>& params, const std::vector<double>& grad) {
        if (params.size() != size() || grad.size() != size())
            throw std::invalid_argument("adadelta: shape mismatch");
        for (size_t i = 0; i < grad.size(); ++i) {
            double g = grad[i];
            if (g == 0.0) continue;
            if (!std::isfinite(g))
                throw std::invalid_argument("adadelta: non-finite gradient");
            avg_sq_grad_[i] = rho_ * avg_sq_grad_[i] + (1.0 - rho_) * g * g;
            double delta = std::sqrt(avg_sq_update_[i] + eps_) /
                           std::sqrt(avg_sq_grad_[i] + eps_) * g;
            params[i] += delta;
            avg_sq_update_[i] =
                rho_ * avg_sq_update_[i] + (1.0 - rho_) * delta * delta;
        }
    }

  private:
    double rho_, eps_;
    std::vector<double> avg_sq_grad_;
    std::vector<double> avg_sq_update_;
};

}  // namespace ehr
