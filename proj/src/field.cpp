#include "sns/field.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sns {

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double a) {
    for (double& c : coeffs_) c *= a;
    return *this;
}

SpectralField& SpectralField::axpy(double a, const SpectralField& o) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * o.coeffs_[i];
    return *this;
}

bool SpectralField::finite() const {
    double s = 0.0;
    for (double c : coeffs_) s += c * c;
    return std::isfinite(s);
}

SpectralField basis_field(WaveIndex k, int degree) {
    if (k.zero())
        throw std::invalid_argument("basis_field: k = (0,0) is excluded (mean-zero basis)");
    if (k.degree() > degree)
        throw std::invalid_argument("basis_field: max(|k1|,|k2|) = " +
                                    std::to_string(k.degree()) + " exceeds truncation N = " +
                                    std::to_string(degree));
    SpectralField f(degree);
    f.set(k, 1.0);
    return f;
}

SpectralField project(const SpectralField& w, int M) {
    if (M < 1) throw std::invalid_argument("project: M must be >= 1");
    SpectralField out(M);
    const int N = w.degree();
    const int r = std::min(M, N);
    for (int k2 = -r; k2 <= r; ++k2)
        for (int k1 = -r; k1 <= r; ++k1)
            if (k1 != 0 || k2 != 0) out.set(k1, k2, w(k1, k2));
    return out;
}

double sobolev_norm(const SpectralField& w, double s) {
    const int N = w.degree();
    double acc = 0.0;
    if (s == 0.0) {
        for (double c : w.raw()) acc += c * c;
        return std::sqrt(acc);
    }
    for (int k2 = -N; k2 <= N; ++k2) {
        for (int k1 = -N; k1 <= N; ++k1) {
            if (k1 == 0 && k2 == 0) continue;
            const double c = w(k1, k2);
            if (c == 0.0) continue;
            acc += std::pow(static_cast<double>(k1 * k1 + k2 * k2), s) * c * c;
        }
    }
    return std::sqrt(acc);
}

double l2_inner(const SpectralField& a, const SpectralField& b) {
    if (a.degree() != b.degree())
        throw std::invalid_argument("l2_inner: mismatched truncation degrees");
    double acc = 0.0;
    auto ra = a.raw();
    auto rb = b.raw();
    for (std::size_t i = 0; i < ra.size(); ++i) acc += ra[i] * rb[i];
    return acc;
}

}  // namespace sns
