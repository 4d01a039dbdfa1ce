#include "detector/platt.hpp"

#include <cmath>
#include <cstddef>

#include "core/error.hpp"

namespace selflearn {

double Calibration::probability(double f) const {
    const double t = f * A + B;
    if (t >= 0.0) {
        const double e = std::exp(-t);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(t));
}

Calibration fit_platt(const std::vector<std::pair<double, int>>& scored_labels) {
    std::size_t prior1 = 0, prior0 = 0;
    for (const auto& [f, y] : scored_labels) {
        (void)f;
        if (y > 0) ++prior1;
        else ++prior0;
    }
    if (prior1 == 0 || prior0 == 0)
        throw SlfError("sigmoid calibration needs both classes present");

    const std::size_t n = scored_labels.size();
    const double hi_target = (double(prior1) + 1.0) / (double(prior1) + 2.0);
    const double lo_target = 1.0 / (double(prior0) + 2.0);

    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = scored_labels[i].second > 0 ? hi_target : lo_target;

    double A = 0.0;
    double B = std::log((double(prior0) + 1.0) / (double(prior1) + 1.0));

    auto objective = [&](double a, double b) {
        double obj = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double fApB = scored_labels[i].first * a + b;
            if (fApB >= 0.0)
                obj += t[i] * fApB + std::log1p(std::exp(-fApB));
            else
                obj += (t[i] - 1.0) * fApB + std::log1p(std::exp(fApB));
        }
        return obj;
    };

    const int max_iter = 100;
    const double min_step = 1e-10;
    const double sigma = 1e-12;
    double fval = objective(A, B);

    for (int iter = 0; iter < max_iter; ++iter) {
        double h11 = sigma, h22 = sigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double f = scored_labels[i].first;
            const double fApB = f * A + B;
            double p, q;
            if (fApB >= 0.0) {
                p = std::exp(-fApB) / (1.0 + std::exp(-fApB));
                q = 1.0 / (1.0 + std::exp(-fApB));
            } else {
                p = 1.0 / (1.0 + std::exp(fApB));
                q = std::exp(fApB) / (1.0 + std::exp(fApB));
            }
            const double d2 = p * q;
            h11 += f * f * d2;
            h22 += d2;
            h21 += f * d2;
            const double d1 = t[i] - p;
            g1 += f * d1;
            g2 += d1;
        }
        if (std::fabs(g1) < 1e-5 && std::fabs(g2) < 1e-5) break;

        const double det = h11 * h22 - h21 * h21;
        const double dA = -(h22 * g1 - h21 * g2) / det;
        const double dB = -(-h21 * g1 + h11 * g2) / det;
        const double gd = g1 * dA + g2 * dB;

        double stepsize = 1.0;
        while (stepsize >= min_step) {
            const double newA = A + stepsize * dA;
            const double newB = B + stepsize * dB;
            const double newf = objective(newA, newB);
            if (newf < fval + 1e-4 * stepsize * gd) {
                A = newA;
                B = newB;
                fval = newf;
                break;
            }
            stepsize /= 2.0;
        }
        if (stepsize < min_step) break;
    }

    Calibration cal;
    cal.A = A;
    cal.B = B;
    return cal;
}

} // namespace selflearn
