#pragma once

#include "sns/field.hpp"
#include "sns/grid.hpp"

namespace sns {

struct VelocityField {
    SpectralField u1;
    SpectralField u2;
};

/// u = Kw: the divergence-free velocity with d2 u1 - d1 u2 = w, realized
/// through the streamfunction psi = laplacian^{-1} w, u = (d2 psi, -d1 psi).
VelocityField biot_savart(const SpectralField& w);

/// Spectral partial derivative along axis 1 or 2.
SpectralField derivative(const SpectralField& w, int axis);

/// Laplacian (multiplies each coefficient by -|k|^2).
SpectralField laplacian(const SpectralField& w);

/// pi_N B(Kw, w) on the per-thread workspace for w's degree.
SpectralField nonlinear_term(const SpectralField& w);

}  // namespace sns
