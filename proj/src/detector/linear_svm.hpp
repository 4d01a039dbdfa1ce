#pragma once

#include <cstdint>
#include <vector>

namespace selflearn {

// L2-regularized hinge-loss SVM with per-example target margins:
//   min_w 0.5*||w||^2 + C * sum_i max(0, t_i - y_i * w.x_i)
// Solved by dual coordinate descent (deterministic sweep order). The target
// margin t_i lets callers fold per-example constant score offsets (e.g.
// deformation penalties at fixed latent placements) into a convex problem.
struct SvmExample {
    std::vector<float> x;
    std::int8_t y = 1;     // +1 or -1
    double target = 1.0;   // t_i
};

struct SvmSolution {
    std::vector<double> w;
    double objective = 0.0; // primal at returned w
    int epochs = 0;
};

double svm_primal_objective(const std::vector<double>& w,
                            const std::vector<SvmExample>& examples, double C);

// `alphas` carries the dual state for warm starts; pass an empty vector for a
// cold start. It is resized to examples.size() and updated in place.
SvmSolution solve_hinge_svm(const std::vector<SvmExample>& examples, std::size_t dim, double C,
                            std::vector<double>& alphas, int max_epochs = 1000,
                            double tol = 1e-8);

} // namespace selflearn
