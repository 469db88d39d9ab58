#pragma once
#include <functional>
#include <vector>

#include "exterior.hpp"

namespace g2forge {

struct LMOptions {
    int max_iters = 200;
    double tol = 1e-10;       // stop when ||r|| < tol
    double step_tol = 1e-15;  // relative step size floor
    double lambda0 = 1e-3;
};

struct LMResult {
    Vector x;
    double residual = 0.0;  // ||r||_2 at x
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;  // ||r|| after each accepted or rejected step
};

// fn(x, r, J): fill residual r and, when J != nullptr, its Jacobian
using ResidualFn = std::function<void(const Vector&, Vector&, Matrix*)>;

inline LMResult levenberg_marquardt(const ResidualFn& fn, Vector x, const LMOptions& opt = {}) {
    LMResult out;
    Vector r;
    Matrix J;
    fn(x, r, &J);
    double f = r.norm();
    out.trace.push_back(f);
    double lambda = opt.lambda0;
    int it = 0;
    for (; it < opt.max_iters && f >= opt.tol; ++it) {
        Matrix A = J.transpose() * J;
        Vector g = J.transpose() * r;
        Vector diag = A.diagonal().cwiseMax(1e-12);
        bool accepted = false;
        for (int tries = 0; tries < 30 && !accepted; ++tries) {
            Matrix Ad = A;
            Ad.diagonal() += lambda * diag;
            Vector step = Ad.ldlt().solve(-g);
            if (!step.allFinite()) {
                lambda *= 10;
                continue;
            }
            Vector xn = x + step;
            Vector rn;
            fn(xn, rn, nullptr);
            double fn_ = rn.norm();
            if (std::isfinite(fn_) && fn_ < f) {
                bool tiny = step.norm() <= opt.step_tol * (x.norm() + opt.step_tol);
                x = xn;
                f = fn_;
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                fn(x, r, &J);
                if (tiny) it = opt.max_iters;
            } else {
                lambda *= 4.0;
            }
        }
        out.trace.push_back(f);
        if (!accepted) break;
    }
    out.x = x;
    out.residual = f;
    out.iterations = it;
    out.converged = f < opt.tol;
    return out;
}

}  // namespace g2forge
