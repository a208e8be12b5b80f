#ifndef GRAPHSEQ_TESTS_GRADCHECK_HPP
#define GRAPHSEQ_TESTS_GRADCHECK_HPP

// Central finite-difference oracle for BPTT gradients, shared by the unit and
// acceptance suites. Stays on the loss-evaluation path only; the analytic
// gradients under test come from the add_*_gradient entry points.

#include <algorithm>
#include <cmath>
#include <vector>

#include "graphseq/recurrent.hpp"

namespace gradcheck {

enum class LossKind { regression, lm, olr_output, olr_hidden };

inline double eval_loss(const graphseq::RecurrentModel& m, LossKind kind,
                        const std::vector<int>& a, const std::vector<int>& b,
                        double target) {
    using namespace graphseq;
    switch (kind) {
        case LossKind::regression: return task_loss_regression(m, a, target);
        case LossKind::lm: return task_loss_lm(m, a);
        case LossKind::olr_output: return olr_loss(m, a, b, OlrTarget::output);
        default: return olr_loss(m, a, b, OlrTarget::hidden);
    }
}

inline double analytic_gradient(const graphseq::RecurrentModel& m, LossKind kind,
                                const std::vector<int>& a, const std::vector<int>& b,
                                double target, std::vector<double>& grad) {
    using namespace graphseq;
    grad.assign(m.theta.size(), 0.0);
    switch (kind) {
        case LossKind::regression: return add_regression_gradient(m, a, target, 1.0, grad);
        case LossKind::lm: return add_lm_gradient(m, a, 1.0, grad);
        case LossKind::olr_output:
            return add_olr_gradient(m, a, b, OlrTarget::output, 1.0, grad);
        default: return add_olr_gradient(m, a, b, OlrTarget::hidden, 1.0, grad);
    }
}

// max relative error of analytic vs central differences (step 1e-5)
inline double max_relative_error(graphseq::RecurrentModel m, LossKind kind,
                                 const std::vector<int>& a, const std::vector<int>& b,
                                 double target) {
    std::vector<double> grad;
    analytic_gradient(m, kind, a, b, target, grad);
    const double eps = 1e-5;
    double worst = 0.0;
    for (std::size_t i = 0; i < m.theta.size(); ++i) {
        const double saved = m.theta[i];
        m.theta[i] = saved + eps;
        const double up = eval_loss(m, kind, a, b, target);
        m.theta[i] = saved - eps;
        const double down = eval_loss(m, kind, a, b, target);
        m.theta[i] = saved;
        const double numeric = (up - down) / (2.0 * eps);
        const double denom = std::max({std::abs(numeric), std::abs(grad[i]), 1e-6});
        worst = std::max(worst, std::abs(numeric - grad[i]) / denom);
    }
    return worst;
}

}  // namespace gradcheck

#endif  // GRAPHSEQ_TESTS_GRADCHECK_HPP
