#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace regge {

using cplx = std::complex<double>;

// Roots of c[0] + c[1] t + ... + c[n] t^n via companion-matrix eigenvalues.
// Leading coefficients below trim_rel * max|c| are dropped first.
inline std::vector<cplx> polynomial_roots(std::vector<cplx> c, double trim_rel = 1e-14)
{
    double cmax = 0;
    for (auto v : c) cmax = std::max(cmax, std::abs(v));
    while (c.size() > 1 && std::abs(c.back()) <= trim_rel * cmax) c.pop_back();
    const auto n = static_cast<Eigen::Index>(c.size()) - 1;
    if (n < 1) return {};
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) m(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) m(i, n - 1) = -c[static_cast<std::size_t>(i)] / c.back();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
    std::vector<cplx> out;
    if (solver.info() != Eigen::Success) return out;
    for (Eigen::Index i = 0; i < n; ++i) out.push_back(solver.eigenvalues()(i));
    return out;
}

inline std::vector<cplx> poly_add(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    std::vector<cplx> r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

inline std::vector<cplx> poly_mul(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    if (a.empty() || b.empty()) return {};
    std::vector<cplx> r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

inline std::vector<cplx> poly_scale(std::vector<cplx> a, cplx s)
{
    for (auto& v : a) v *= s;
    return a;
}

}  // namespace regge
