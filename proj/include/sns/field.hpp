#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace sns {

/// Wavenumber pair in Z^2 \ {(0,0)}.
struct WaveIndex {
    int k1 = 0;
    int k2 = 0;

    /// Upper half-plane ordering: k2 > 0, or k2 == 0 and k1 > 0.
    bool positive() const { return k2 > 0 || (k2 == 0 && k1 > 0); }
    bool zero() const { return k1 == 0 && k2 == 0; }
    int norm2() const { return k1 * k1 + k2 * k2; }
    int degree() const { return std::max(std::abs(k1), std::abs(k2)); }
    WaveIndex negated() const { return {-k1, -k2}; }

    friend bool operator==(const WaveIndex&, const WaveIndex&) = default;
};

/// Mean-zero vorticity field on the torus, stored as real coefficients
/// against the orthonormal eigenbasis: sine for positive indices, cosine
/// otherwise, both scaled by (2 pi^2)^(-1/2).  Coefficients cover the
/// square truncation max(|k1|,|k2|) <= N; the (0,0) slot is fixed at zero.
class SpectralField {
  public:
    explicit SpectralField(int degree)
        : degree_(degree), side_(2 * degree + 1),
          coeffs_(static_cast<std::size_t>(side_) * side_, 0.0) {}

    int degree() const { return degree_; }
    int side() const { return side_; }

    double operator()(int k1, int k2) const { return coeffs_[index(k1, k2)]; }
    double operator()(WaveIndex k) const { return (*this)(k.k1, k.k2); }

    void set(int k1, int k2, double v) {
        if (k1 == 0 && k2 == 0) return;  // mean-zero invariant
        coeffs_[index(k1, k2)] = v;
    }
    void set(WaveIndex k, double v) { set(k.k1, k.k2, v); }
    void add(int k1, int k2, double v) {
        if (k1 == 0 && k2 == 0) return;
        coeffs_[index(k1, k2)] += v;
    }

    std::span<const double> raw() const { return coeffs_; }
    std::span<double> raw() { return coeffs_; }

    std::size_t index(int k1, int k2) const {
        return static_cast<std::size_t>(k1 + degree_) +
               static_cast<std::size_t>(side_) * static_cast<std::size_t>(k2 + degree_);
    }

    void set_zero() { std::fill(coeffs_.begin(), coeffs_.end(), 0.0); }

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double a);
    /// this += a * o
    SpectralField& axpy(double a, const SpectralField& o);

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double a, SpectralField f) { return f *= a; }

    bool finite() const;

  private:
    int degree_;
    int side_;
    std::vector<double> coeffs_;
};

/// Field with coefficient 1 at k, 0 elsewhere.  Rejects k = (0,0) and
/// indices outside the truncation.
SpectralField basis_field(WaveIndex k, int degree);

/// Galerkin projection onto the square truncation of degree M.
SpectralField project(const SpectralField& w, int M);

/// sqrt(sum over k of (k1^2+k2^2)^s w_k^2); s = 0 gives the plain norm.
double sobolev_norm(const SpectralField& w, double s);

/// L2 inner product (coefficients are orthonormal).
double l2_inner(const SpectralField& a, const SpectralField& b);

}  // namespace sns
