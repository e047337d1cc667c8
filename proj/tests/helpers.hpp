#pragma once

#include <vector>

#include "dynoclust/common.hpp"

namespace dctest {

inline dynoclust::Vec v2(double x, double y) {
    dynoclust::Vec v(2);
    v << x, y;
    return v;
}

inline dynoclust::Vec v1(double x) {
    dynoclust::Vec v(1);
    v << x;
    return v;
}

inline dynoclust::Vec random_vec(dynoclust::Rng& rng, int dim, double lo = -1.0, double hi = 1.0) {
    dynoclust::Vec v(dim);
    for (int d = 0; d < dim; ++d) v(d) = rng.uniform(lo, hi);
    return v;
}

inline dynoclust::Mat random_symmetric(dynoclust::Rng& rng, int n, double scale = 1.0) {
    dynoclust::Mat m(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = scale * rng.uniform(-1.0, 1.0);
        for (int j = i + 1; j < n; ++j) {
            m(i, j) = scale * rng.uniform(-1.0, 1.0);
            m(j, i) = m(i, j);
        }
    }
    return m;
}

}  // namespace dctest
