#include "atax/random.hpp"

#include "atax/error.hpp"

namespace atax {

Vector Rng::gaussian(Eigen::Index d) {
    Vector g(d);
    for (Eigen::Index i = 0; i < d; ++i) g[i] = normal();
    return g;
}

Direction sample_uniform_direction(Eigen::Index d, Rng& rng) {
    if (d < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be >= 1");
    for (;;) {
        Vector g = rng.gaussian(d);
        if (g.norm() > kZeroNormTolerance) return Direction::normalize(g);
    }
}

Direction sample_orthogonal_direction(const Matrix& orthonormal, Rng& rng) {
    const Eigen::Index d = orthonormal.rows();
    if (orthonormal.cols() >= d) {
        throw Error(ErrorKind::SpecInfeasible, "orthogonal complement is trivial");
    }
    for (;;) {
        Vector g = rng.gaussian(d);
        // Two passes of classical Gram-Schmidt keep the result orthogonal to
        // working precision.
        for (int pass = 0; pass < 2; ++pass) g -= orthonormal * (orthonormal.transpose() * g);
        if (g.norm() > 1e-8) return Direction::normalize(g);
    }
}

}  // namespace atax
