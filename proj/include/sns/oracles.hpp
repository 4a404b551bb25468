#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sns/field.hpp"

namespace sns::oracles {

/// Reproducible pseudo-random field with a mildly decaying spectrum;
/// independent of the driving-noise machinery.
SpectralField random_field(int degree, std::uint64_t seed, double scale = 1.0);

/// pi_N B(Kw, w) by direct convolution over mode pairs (O(N^4)); the
/// reference the pseudospectral route is checked against.
SpectralField nonlinear_direct_convolution(const SpectralField& w);

/// Sequential Sobol' generator transcribed from the published Joe-Kuo
/// reference code (stateful XOR stream); an independent construction of
/// the same sequence used to pin SobolStream bit for bit.
class ReferenceSobol {
  public:
    ReferenceSobol(int dimension, const std::string& direction_file);
    /// Returns the next point, starting with point 0 (the origin).
    std::vector<double> next();

  private:
    int dim_;
    std::uint64_t produced_ = 0;
    std::vector<std::uint32_t> x_;
    std::vector<std::vector<std::uint32_t>> v_;
};

/// Running mean / variance / standard error.
struct Moments {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    double variance() const { return m2 / static_cast<double>(n - 1); }
    double stderr_mean() const { return std::sqrt(variance() / static_cast<double>(n)); }
    /// standard error of the sample variance under normality
    double stderr_variance() const {
        return variance() * std::sqrt(2.0 / static_cast<double>(n - 1));
    }
};

}  // namespace sns::oracles
