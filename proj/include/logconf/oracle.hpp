// Independent reference computations for the oracle suites.
// Nothing in here calls the spectral code of the library unless it is the
// quantity under test.
#pragma once

#include "logconf/tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace logconf::oracle {

using Mat4 = std::array<std::array<long double, 4>, 4>;

inline Mat4 mul(const Mat4& a, const Mat4& b)
{
    Mat4 c{};
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            for (int j = 0; j < 4; ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

/// exp of a 4x4 matrix by Taylor series with scaling and squaring, in long double.
inline Mat4 expm4(Mat4 m)
{
    long double norm = 0.0L;
    for (auto& row : m)
        for (long double v : row) norm = std::max(norm, std::fabs(v));
    int squarings = 0;
    while (norm * 4.0L > 0.25L) {
        norm *= 0.5L;
        ++squarings;
    }
    const long double scale = std::ldexp(1.0L, -squarings);
    for (auto& row : m)
        for (long double& v : row) v *= scale;
    Mat4 result{};
    Mat4 term{};
    for (int i = 0; i < 4; ++i) result[i][i] = term[i][i] = 1.0L;
    for (int k = 1; k < 30; ++k) {
        term = mul(term, m);
        for (auto& row : term)
            for (long double& v : row) v /= static_cast<long double>(k);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) result[i][j] += term[i][j];
    }
    for (int s = 0; s < squarings; ++s) result = mul(result, result);
    return result;
}

struct ExpPair {
    SymTensor2 value;       ///< exp(A)
    SymTensor2 derivative;  ///< Dexp(A)[E]
};

/// exp(A) and its Frechet derivative from exp([[A, E], [0, A]]).
inline ExpPair exp_block(const SymTensor2& a, const SymTensor2& e)
{
    Mat4 m{};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            m[i][j] = a(i, j);
            m[i + 2][j + 2] = a(i, j);
            m[i][j + 2] = e(i, j);
        }
    }
    const Mat4 x = expm4(m);
    auto sym = [](long double p, long double q, long double r) {
        return SymTensor2{static_cast<double>(p), static_cast<double>(q), static_cast<double>(r)};
    };
    return {sym(x[0][0], 0.5L * (x[0][1] + x[1][0]), x[1][1]),
            sym(x[0][2], 0.5L * (x[0][3] + x[1][2]), x[1][3])};
}

/// Plain 2x2 matrix for non-symmetric products.
struct Mat2 {
    double a11, a12, a21, a22;
};

inline Mat2 mul(const Mat2& l, const SymTensor2& s)
{
    return {l.a11 * s.xx + l.a12 * s.xy, l.a11 * s.xy + l.a12 * s.yy, l.a21 * s.xx + l.a22 * s.xy,
            l.a21 * s.xy + l.a22 * s.yy};
}

/// L c + c L^T for symmetric c.
inline SymTensor2 upper_convective(const Mat2& l, const SymTensor2& c)
{
    const Mat2 lc = mul(l, c);
    return {2.0 * lc.a11, lc.a12 + lc.a21, 2.0 * lc.a22};
}

inline SymTensor2 random_sym(std::mt19937_64& rng, double scale)
{
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng), u(rng)};
}

inline SymTensor2 rotate(const SymTensor2& t, double angle)
{
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    // Q t Q^T with Q = [[c, -s], [s, c]].
    return {c * c * t.xx - 2.0 * c * s * t.xy + s * s * t.yy, c * s * (t.xx - t.yy) + (c * c - s * s) * t.xy,
            s * s * t.xx + 2.0 * c * s * t.xy + c * c * t.yy};
}

struct EquivalenceSample {
    double error = 0.0;  ///< Frobenius error between the two sides
    double scale = 0.0;  ///< largest term magnitude entering either side
};

/**
 * One draw of the constitutive-law equivalence check.
 *
 * Draws SPD c, a velocity gradient L and a material derivative H of chi,
 * then compares lambda (cdot - L c - c L^T) + c - I/a against
 * Dexp(a chi)[R_chi] with R_chi the log-form residual built from fn_f and
 * fn_kappa.  cdot = Dexp(a chi)[H] and both Frechet derivatives come from
 * the block exponential.
 */
inline EquivalenceSample equivalence_draw(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    PhysicalParams p;
    p.eta_total = 0.5 + 1.5 * unit(rng);
    p.beta = 0.1 + 0.8 * unit(rng);
    const double a = 0.1 + 4.9 * unit(rng);
    p.lambda = a * p.eta_polymer();

    const double s1 = -3.0 + 6.0 * unit(rng);
    const double s2 = -3.0 + 6.0 * unit(rng);
    const double angle = 2.0 * M_PI * unit(rng);
    const SymTensor2 c = (1.0 / a) * rotate({std::exp(s1), 0.0, std::exp(s2)}, angle);
    std::uniform_real_distribution<double> g(-2.0, 2.0);
    const Mat2 l{g(rng), g(rng), g(rng), g(rng)};
    const SymTensor2 h = random_sym(rng, 2.0);

    const SymTensor2 chi = chi_from_sigma(p, c - (1.0 / a) * SymTensor2::identity());
    const SymTensor2 eps{l.a11, 0.5 * (l.a12 + l.a21), l.a22};
    const double omega = 0.5 * (l.a12 - l.a21);

    const SymTensor2 cdot = exp_block(a * chi, h).derivative;
    const SymTensor2 conv = upper_convective(l, c);
    const SymTensor2 r_c = p.lambda * (cdot - conv) + c - (1.0 / a) * SymTensor2::identity();

    const double eta_p = p.eta_polymer();
    const SymTensor2 r_chi = p.lambda * (h + commutator_with_skew(chi, omega)) + chi - fn_f(a, -chi) +
                             2.0 * eta_p * fn_kappa(a * chi, eps) - 2.0 * eta_p * eps;
    const SymTensor2 image = exp_block(a * chi, r_chi).derivative;

    EquivalenceSample out;
    out.error = (r_c - image).norm();
    out.scale = std::max({r_c.norm(), p.lambda * cdot.norm(), p.lambda * conv.norm(), c.norm(),
                          std::sqrt(2.0) / a});
    return out;
}

}  // namespace logconf::oracle
