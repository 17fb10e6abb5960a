/**
 * @file tensor.hpp
 * @brief Spectral calculus on symmetric 2x2 tensors for the logarithmic
 *        conformation form of the Oldroyd-B law.
 *
 * The log-conformation tensor chi carries stress units and is related to the
 * conformation tensor by c = (1/a) exp(a chi), a = lambda / eta_p.  The two
 * nonlinear maps of the reformulated constitutive law are
 *
 *   f(a, chi)   = (exp(a chi) - I) / a - chi          (f(0, .) = 0)
 *   kappa(b, d) = sum_{i != j} k((b_i - b_j) / 2) P_i d P_j,
 *                 k(x) = 1 - x coth(x)                 (kappa(0, .) = 0)
 *
 * where b_i, P_i are the eigenvalues and spectral projectors of b.  First
 * derivatives use the Daleckii-Krein divided-difference rule.
 */
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace logconf {

/// Symmetric 2x2 tensor stored by its three independent components.
struct SymTensor2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;

    constexpr SymTensor2() = default;
    constexpr SymTensor2(double a, double b, double c) : xx(a), xy(b), yy(c) {}

    /// Throws std::invalid_argument on non-finite components.
    static SymTensor2 checked(double a, double b, double c);

    static constexpr SymTensor2 identity() { return {1.0, 0.0, 1.0}; }
    static constexpr SymTensor2 zero() { return {}; }

    /// Component by symmetric-basis index m: 0 -> xx, 1 -> xy, 2 -> yy.
    [[nodiscard]] constexpr double operator[](int m) const { return m == 0 ? xx : (m == 1 ? xy : yy); }
    [[nodiscard]] constexpr double& operator[](int m) { return m == 0 ? xx : (m == 1 ? xy : yy); }

    /// Entry (i, j) of the full matrix.
    [[nodiscard]] constexpr double operator()(int i, int j) const
    {
        return i != j ? xy : (i == 0 ? xx : yy);
    }

    [[nodiscard]] constexpr double trace() const { return xx + yy; }
    [[nodiscard]] double norm() const { return std::sqrt(xx * xx + 2.0 * xy * xy + yy * yy); }
    [[nodiscard]] bool is_finite() const
    {
        return std::isfinite(xx) && std::isfinite(xy) && std::isfinite(yy);
    }

    constexpr SymTensor2& operator+=(const SymTensor2& o)
    {
        xx += o.xx; xy += o.xy; yy += o.yy;
        return *this;
    }
    constexpr SymTensor2& operator-=(const SymTensor2& o)
    {
        xx -= o.xx; xy -= o.xy; yy -= o.yy;
        return *this;
    }
    constexpr SymTensor2& operator*=(double s)
    {
        xx *= s; xy *= s; yy *= s;
        return *this;
    }
};

constexpr SymTensor2 operator+(SymTensor2 a, const SymTensor2& b) { return a += b; }
constexpr SymTensor2 operator-(SymTensor2 a, const SymTensor2& b) { return a -= b; }
constexpr SymTensor2 operator-(const SymTensor2& a) { return {-a.xx, -a.xy, -a.yy}; }
constexpr SymTensor2 operator*(double s, SymTensor2 a) { return a *= s; }
constexpr SymTensor2 operator*(SymTensor2 a, double s) { return a *= s; }

/// Full contraction A : B = sum_ij A_ij B_ij.
constexpr double ddot(const SymTensor2& a, const SymTensor2& b)
{
    return a.xx * b.xx + 2.0 * a.xy * b.xy + a.yy * b.yy;
}

/// Symmetric basis E_m = {e1e1, e1e2 + e2e1, e2e2}, matching chi = sum zeta_m E_m.
constexpr SymTensor2 sym_basis(int m)
{
    return m == 0 ? SymTensor2{1.0, 0.0, 0.0} : (m == 1 ? SymTensor2{0.0, 1.0, 0.0} : SymTensor2{0.0, 0.0, 1.0});
}

/// chi * W - W * chi for the skew tensor W = [[0, w], [-w, 0]].
constexpr SymTensor2 commutator_with_skew(const SymTensor2& chi, double w)
{
    return {-2.0 * w * chi.xy, w * (chi.xx - chi.yy), 2.0 * w * chi.xy};
}

/// Eigen-decomposition t = R diag(eig1, eig2) R^T with R = [[c, -s], [s, c]].
struct Spectral2 {
    double eig1 = 0.0;
    double eig2 = 0.0;
    double c = 1.0;
    double s = 0.0;

    /// R^T t R for a symmetric t.
    [[nodiscard]] SymTensor2 to_eigenbasis(const SymTensor2& t) const;
    /// R t R^T for a symmetric t given in the eigenbasis.
    [[nodiscard]] SymTensor2 from_eigenbasis(const SymTensor2& t) const;
    /// R diag(g1, g2) R^T.
    [[nodiscard]] SymTensor2 compose(double g1, double g2) const;
    [[nodiscard]] SymTensor2 reconstruct() const { return compose(eig1, eig2); }
};

/// Closed-form symmetric 2x2 eigen-decomposition, eig1 >= eig2.
Spectral2 eig_sym2(const SymTensor2& t);

/// Material parameters of an Oldroyd-B fluid.
struct PhysicalParams {
    double rho = 0.0;        ///< density
    double eta_total = 1.0;  ///< total viscosity eta_s + eta_p
    double beta = 0.5;       ///< solvent viscosity ratio eta_s / eta_total, in (0, 1)
    double lambda = 0.0;     ///< relaxation time

    [[nodiscard]] double eta_solvent() const { return beta * eta_total; }
    [[nodiscard]] double eta_polymer() const { return (1.0 - beta) * eta_total; }
    /// First argument of f: lambda / eta_p.
    [[nodiscard]] double a() const { return lambda / eta_polymer(); }

    /// Throws std::invalid_argument when the invariants do not hold.
    void validate() const;
};

/// Non-SPD argument to a logarithm; carries the offending eigenvalue.
class DomainError : public std::domain_error {
public:
    DomainError(const std::string& what, double eigenvalue)
        : std::domain_error(what), eigenvalue_(eigenvalue) {}
    [[nodiscard]] double eigenvalue() const noexcept { return eigenvalue_; }

private:
    double eigenvalue_;
};

/// Exponential overflow.
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

/// Largest exponent accepted before exp() is considered an overflow.
inline constexpr double kMaxExponent = 700.0;

SymTensor2 mat_exp_sym(const SymTensor2& t);
SymTensor2 mat_log_spd(const SymTensor2& t);

SymTensor2 fn_f(double a, const SymTensor2& chi);
SymTensor2 fn_kappa(const SymTensor2& beta_t, const SymTensor2& d);

/// Gateaux derivative of f(a, .) at chi in direction dir.
SymTensor2 dfn_f(double a, const SymTensor2& chi, const SymTensor2& dir);
/// Second Gateaux derivative D^2 f(a, chi)[h, k].
SymTensor2 d2fn_f(double a, const SymTensor2& chi, const SymTensor2& h, const SymTensor2& k);
/// Gateaux derivative of kappa with respect to its first argument, d held fixed.
SymTensor2 dfn_kappa(const SymTensor2& beta_t, const SymTensor2& d, const SymTensor2& dir);

SymTensor2 sigma_from_chi(const PhysicalParams& p, const SymTensor2& chi);
SymTensor2 chi_from_sigma(const PhysicalParams& p, const SymTensor2& sigma);

namespace detail {

/// (e^z - 1 - z) / z^2.
double exp_remainder2(double z);
/// sinh(z) / z - 1.
double sinhc_minus_one(double z);
/// k(x) = 1 - x coth x.
double kappa_coeff(double x);
/// k(x) / x.
double kappa_coeff_over_x(double x);
/// k'(x).
double kappa_coeff_prime(double x);

/// Divided difference of g(x) = (e^{ax} - 1)/a - x between x and y.
double f_divided_difference(double a, double x, double y);

}  // namespace detail

/**
 * Cached spectral data of chi for repeated f/kappa evaluations at one point.
 *
 * Holds the eigenbasis of chi (shared by a*chi and -chi) and the
 * divided-difference tables needed by Df(a, chi), Df(a, -chi) and the
 * kappa derivatives.
 */
class ConstitutivePoint {
public:
    ConstitutivePoint(double a, const SymTensor2& chi);

    [[nodiscard]] const Spectral2& spectral() const { return spec_; }
    [[nodiscard]] double a() const { return a_; }

    /// f(a, chi) and f(a, -chi).
    [[nodiscard]] SymTensor2 f_plus() const;
    [[nodiscard]] SymTensor2 f_minus() const;

    /// Df(a, chi)[h] and Df(a, -chi)[h].
    [[nodiscard]] SymTensor2 df_plus(const SymTensor2& h) const;
    [[nodiscard]] SymTensor2 df_minus(const SymTensor2& h) const;

    /// kappa(a chi, d).
    [[nodiscard]] SymTensor2 kappa(const SymTensor2& d) const;
    /// D_1 kappa(a chi, d)[h] (derivative in the first argument).
    [[nodiscard]] SymTensor2 dkappa(const SymTensor2& d, const SymTensor2& h) const;

private:
    double a_;
    Spectral2 spec_;
    // Divided differences phi_11, phi_12, phi_22 of g at (eig of chi) and at (eig of -chi).
    std::array<double, 3> phi_plus_{};
    std::array<double, 3> phi_minus_{};
    // f values on the eigenvalues.
    std::array<double, 2> g_plus_{};
    std::array<double, 2> g_minus_{};
    // kappa tables in terms of x = a (chi_1 - chi_2) / 2.
    double k_ = 0.0;
    double k_over_x_ = 0.0;
    double k_prime_ = 0.0;
};

}  // namespace logconf
