#include "sns/spectral_ops.hpp"

#include <stdexcept>

namespace sns {

// Differentiation swaps the sine/cosine pair: with a = w(+k), b = w(-k) for
// positive k, d_j maps (a, b) -> (-k_j b, k_j a).
SpectralField derivative(const SpectralField& w, int axis) {
    if (axis != 1 && axis != 2) throw std::invalid_argument("derivative: axis must be 1 or 2");
    const int N = w.degree();
    SpectralField out(N);
    for (int k2 = 0; k2 <= N; ++k2) {
        const int k1lo = (k2 == 0) ? 1 : -N;
        for (int k1 = k1lo; k1 <= N; ++k1) {
            const double a = w(k1, k2);
            const double b = w(-k1, -k2);
            const double kj = (axis == 1) ? k1 : k2;
            out.set(k1, k2, -kj * b);
            out.set(-k1, -k2, kj * a);
        }
    }
    return out;
}

SpectralField laplacian(const SpectralField& w) {
    const int N = w.degree();
    SpectralField out(N);
    for (int k2 = -N; k2 <= N; ++k2)
        for (int k1 = -N; k1 <= N; ++k1) {
            if (k1 == 0 && k2 == 0) continue;
            out.set(k1, k2, -static_cast<double>(k1 * k1 + k2 * k2) * w(k1, k2));
        }
    return out;
}

VelocityField biot_savart(const SpectralField& w) {
    const int N = w.degree();
    VelocityField u{SpectralField(N), SpectralField(N)};
    for (int k2 = 0; k2 <= N; ++k2) {
        const int k1lo = (k2 == 0) ? 1 : -N;
        for (int k1 = k1lo; k1 <= N; ++k1) {
            const double a = w(k1, k2);
            const double b = w(-k1, -k2);
            const double inv = 1.0 / (k1 * k1 + k2 * k2);
            u.u1.set(k1, k2, k2 * b * inv);
            u.u1.set(-k1, -k2, -k2 * a * inv);
            u.u2.set(k1, k2, -k1 * b * inv);
            u.u2.set(-k1, -k2, k1 * a * inv);
        }
    }
    return u;
}

SpectralField nonlinear_term(const SpectralField& w) {
    return workspace_for(w.degree()).nonlinear_term(w);
}

}  // namespace sns
