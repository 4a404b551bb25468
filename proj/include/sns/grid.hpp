#pragma once

#include <memory>
#include <vector>

#include "sns/field.hpp"

struct fftw_plan_s;   // avoid leaking <fftw3.h> into every consumer
typedef double fftw_complex_compat[2];

namespace sns {

/// Point samples on the uniform grid over [0,2pi)^2; values[a*size+b]
/// is the value at x = (2 pi a / size, 2 pi b / size).
struct PhysicalGrid {
    int size = 0;
    std::vector<double> values;
};

/// Smallest even integer >= 3N+1 that factors as 2^a 3^b.  A quadratic
/// product of degree-N fields has modes up to 2N; on a grid of this size
/// none of them aliases back into the retained square |k|_inf <= N.
int dealiased_grid_size(int degree);

/// FFT scratch space for one truncation degree.  Owns FFTW plans and
/// aligned buffers; not thread-safe, intended as per-thread state.
class SpectralWorkspace {
  public:
    explicit SpectralWorkspace(int degree);
    ~SpectralWorkspace();
    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    int degree() const { return degree_; }
    int grid_size() const { return grid_; }

    PhysicalGrid to_grid(const SpectralField& w);
    SpectralField from_grid(const PhysicalGrid& g);

    /// pi_N B(Kw, w) with B(u,w) = -(u.grad)w, evaluated pseudospectrally
    /// on the dealiased grid (exact Galerkin convolution for |k|_inf <= N).
    SpectralField nonlinear_term(const SpectralField& w);

    /// max over grid points of |Kw| (Euclidean speed), for CFL control.
    double max_speed(const SpectralField& w);

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int degree_;
    int grid_;
};

/// Per-thread workspace cache keyed by truncation degree.
SpectralWorkspace& workspace_for(int degree);

}  // namespace sns
