#include "detector/linear_svm.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace selflearn {

double svm_primal_objective(const std::vector<double>& w,
                            const std::vector<SvmExample>& examples, double C) {
    double reg = 0.0;
    for (const double v : w) reg += v * v;
    double loss = 0.0;
    for (const auto& e : examples) {
        double dot = 0.0;
        for (std::size_t j = 0; j < e.x.size(); ++j) dot += w[j] * e.x[j];
        loss += std::max(0.0, e.target - e.y * dot);
    }
    return 0.5 * reg + C * loss;
}

SvmSolution solve_hinge_svm(const std::vector<SvmExample>& examples, std::size_t dim, double C,
                            std::vector<double>& alphas, int max_epochs, double tol) {
    if (examples.empty()) throw SlfError("SVM solve with no examples");
    for (const auto& e : examples)
        if (e.x.size() != dim) throw SlfError("SVM example dimensionality mismatch");

    const std::size_t n = examples.size();
    if (alphas.size() != n) alphas.resize(n, 0.0);
    for (auto& a : alphas) a = std::clamp(a, 0.0, C);

    std::vector<double> qii(n);
    for (std::size_t i = 0; i < n; ++i) {
        double q = 0.0;
        for (const float v : examples[i].x) q += double(v) * v;
        qii[i] = q;
    }

    // w = sum_i alpha_i y_i x_i (recomputed so warm starts stay consistent)
    std::vector<double> w(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (alphas[i] == 0.0) continue;
        const double coef = alphas[i] * examples[i].y;
        const auto& x = examples[i].x;
        for (std::size_t j = 0; j < dim; ++j) w[j] += coef * x[j];
    }

    SvmSolution sol;
    int epoch = 0;
    for (; epoch < max_epochs; ++epoch) {
        double max_violation = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (qii[i] <= 0.0) continue;
            const auto& e = examples[i];
            double dot = 0.0;
            for (std::size_t j = 0; j < dim; ++j) dot += w[j] * e.x[j];
            const double grad = e.y * dot - e.target;
            double pg = grad;
            if (alphas[i] <= 0.0) pg = std::min(grad, 0.0);
            else if (alphas[i] >= C) pg = std::max(grad, 0.0);
            max_violation = std::max(max_violation, std::fabs(pg));
            if (std::fabs(pg) <= 1e-14) continue;
            const double old = alphas[i];
            const double next = std::clamp(old - grad / qii[i], 0.0, C);
            const double delta = next - old;
            if (delta == 0.0) continue;
            alphas[i] = next;
            const double coef = delta * e.y;
            const auto& x = e.x;
            for (std::size_t j = 0; j < dim; ++j) w[j] += coef * x[j];
        }
        if (max_violation < tol) {
            ++epoch;
            break;
        }
    }

    sol.w = std::move(w);
    sol.epochs = epoch;
    sol.objective = svm_primal_objective(sol.w, examples, C);
    return sol;
}

} // namespace selflearn
