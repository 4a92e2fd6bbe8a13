// helpers.hpp: independent reference computations shared by the tests

#pragma once

#include <cmath>

#include "slabrad/common.hpp"
#include "slabrad/model.hpp"

namespace testref {

using slabrad::cplx;
using slabrad::CMatrix;

inline slabrad::SlabParams params(int n, double delta0, double g) {
    slabrad::SlabParams p;
    p.n_layers = n;
    p.delta0 = delta0;
    p.g = g;
    return p;
}

// Sheets radiating into 1D: (w^2 - 1) B_l + i g w sum_l' exp(i w delta0 |l - l'|) B_l' = 0.
inline CMatrix layer_secular(cplx w, int n, double delta0, double g) {
    const cplx i{0.0, 1.0};
    CMatrix s(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            s(a, b) = (a == b ? w * w - 1.0 : cplx{0.0, 0.0}) + i * g * w * std::exp(i * w * (delta0 * std::abs(a - b)));
    return s;
}

// Scalar Newton with a numerical derivative; independent of the library's solver.
template <class F>
cplx newton(F f, cplx w) {
    for (int it = 0; it < 100; ++it) {
        const double h = 1e-7 * std::max(1.0, std::abs(w));
        const cplx d = (f(w + h) - f(w - h)) / (2.0 * h);
        const cplx step = f(w) / d;
        w -= step;
        if (std::abs(step) < 1e-15 * std::abs(w)) break;
    }
    return w;
}

}  // namespace testref
