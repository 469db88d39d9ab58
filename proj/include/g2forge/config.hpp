#pragma once
#include <algorithm>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace g2forge {

struct Tolerances {
    double eps = 1e-9;            // zero test for coefficients and nullspace rank
    double einstein = 1e-8;       // ||Ric - lambda g||_inf
    double ricci_agree = 1e-7;    // method A vs method B
    double soliton = 1e-8;
    double search = 1e-10;        // least-squares acceptance
    double proportional = 1e-6;   // found metric vs k*I
};

inline Tolerances& tolerances() {
    static Tolerances t;
    return t;
}

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : Error {
    using Error::Error;
};
struct DimensionError : Error {
    using Error::Error;
};
struct ConstraintError : Error {
    using Error::Error;
};
struct UnknownAlgebra : Error {
    using Error::Error;
};
// signals an internal inconsistency, never user error
struct InternalError : Error {
    using Error::Error;
};

// results land in slot i, so the outcome does not depend on scheduling
inline void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < count; i += nthreads) body(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace g2forge
