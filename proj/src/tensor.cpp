#include "logconf/tensor.hpp"

#include <algorithm>
#include <sstream>

namespace logconf {

SymTensor2 SymTensor2::checked(double a, double b, double c)
{
    SymTensor2 t{a, b, c};
    if (!t.is_finite()) {
        throw std::invalid_argument("SymTensor2: non-finite component");
    }
    return t;
}

SymTensor2 Spectral2::to_eigenbasis(const SymTensor2& t) const
{
    const double cc = c * c;
    const double ss = s * s;
    const double cs = c * s;
    return {cc * t.xx + 2.0 * cs * t.xy + ss * t.yy,
            -cs * t.xx + (cc - ss) * t.xy + cs * t.yy,
            ss * t.xx - 2.0 * cs * t.xy + cc * t.yy};
}

SymTensor2 Spectral2::from_eigenbasis(const SymTensor2& t) const
{
    const double cc = c * c;
    const double ss = s * s;
    const double cs = c * s;
    return {cc * t.xx - 2.0 * cs * t.xy + ss * t.yy,
            cs * t.xx + (cc - ss) * t.xy - cs * t.yy,
            ss * t.xx + 2.0 * cs * t.xy + cc * t.yy};
}

SymTensor2 Spectral2::compose(double g1, double g2) const
{
    const double cc = c * c;
    const double ss = s * s;
    return {cc * g1 + ss * g2, c * s * (g1 - g2), ss * g1 + cc * g2};
}

Spectral2 eig_sym2(const SymTensor2& t)
{
    const double mean = 0.5 * (t.xx + t.yy);
    const double half_diff = 0.5 * (t.xx - t.yy);
    const double radius = std::hypot(half_diff, t.xy);
    // Half-angle form: tan(2 theta) = 2 t_xy / (t_xx - t_yy).
    const double theta = 0.5 * std::atan2(t.xy, half_diff);
    Spectral2 out;
    out.eig1 = mean + radius;
    out.eig2 = mean - radius;
    out.c = std::cos(theta);
    out.s = std::sin(theta);
    return out;
}

void PhysicalParams::validate() const
{
    auto fail = [](const std::string& msg) { throw std::invalid_argument("PhysicalParams: " + msg); };
    if (!std::isfinite(rho) || rho < 0.0) fail("rho must be finite and >= 0");
    if (!std::isfinite(eta_total) || eta_total <= 0.0) fail("eta_total must be finite and > 0");
    if (!std::isfinite(beta) || beta <= 0.0 || beta >= 1.0) fail("beta must lie in (0, 1)");
    if (!std::isfinite(lambda) || lambda < 0.0) fail("lambda must be finite and >= 0");
}

namespace detail {

double exp_remainder2(double z)
{
    if (std::abs(z) < 0.1) {
        // sum_k z^k / (k + 2)!, k <= 10
        double sum = 0.0;
        double fact = 479001600.0;  // 12!
        for (int k = 10; k >= 0; --k) {
            sum = sum * z + 1.0 / fact;
            fact /= static_cast<double>(k + 2);
        }
        return sum;
    }
    return (std::expm1(z) - z) / (z * z);
}

double sinhc_minus_one(double z)
{
    if (std::abs(z) < 0.5) {
        // sum_k z^{2k} / (2k + 1)!, 1 <= k <= 8
        const double z2 = z * z;
        double sum = 0.0;
        double fact = 355687428096000.0;  // 17!
        for (int k = 8; k >= 1; --k) {
            sum = (sum + 1.0 / fact) * z2;
            fact /= static_cast<double>((2 * k) * (2 * k + 1));
        }
        return sum;
    }
    return std::sinh(z) / z - 1.0;
}

// Series below |x| = 0.1 are truncated after x^10; the dropped term is
// below 1e-15 relative there.
double kappa_coeff(double x)
{
    if (std::abs(x) < 0.1) {
        const double x2 = x * x;
        return x2 * (-1.0 / 3.0 + x2 * (1.0 / 45.0 + x2 * (-2.0 / 945.0 + x2 * (1.0 / 4725.0 - x2 * 2.0 / 93555.0))));
    }
    return 1.0 - x / std::tanh(x);
}

double kappa_coeff_over_x(double x)
{
    if (std::abs(x) < 0.1) {
        const double x2 = x * x;
        return x * (-1.0 / 3.0 + x2 * (1.0 / 45.0 + x2 * (-2.0 / 945.0 + x2 * (1.0 / 4725.0 - x2 * 2.0 / 93555.0))));
    }
    return (1.0 - x / std::tanh(x)) / x;
}

double kappa_coeff_prime(double x)
{
    if (std::abs(x) < 0.1) {
        const double x2 = x * x;
        return x * (-2.0 / 3.0 + x2 * (4.0 / 45.0 + x2 * (-12.0 / 945.0 + x2 * (8.0 / 4725.0 - x2 * 20.0 / 93555.0))));
    }
    if (std::abs(x) > 20.0) {
        return x > 0.0 ? -1.0 : 1.0;
    }
    const double sh = std::sinh(x);
    return -1.0 / std::tanh(x) + x / (sh * sh);
}

double f_divided_difference(double a, double x, double y)
{
    if (a == 0.0) {
        return 0.0;
    }
    const double z = 0.5 * a * (x - y);
    if (std::abs(z) > 20.0) {
        return (std::exp(a * x) - std::exp(a * y)) / (a * (x - y)) - 1.0;
    }
    // e^{am} sinh(z)/z - 1 with m the midpoint, rearranged to avoid cancellation.
    const double am = 0.5 * a * (x + y);
    const double sm1 = sinhc_minus_one(z);
    return std::expm1(am) * (1.0 + sm1) + sm1;
}

}  // namespace detail

namespace {

void check_exponent(double exponent, const char* where)
{
    if (exponent > kMaxExponent) {
        std::ostringstream os;
        os << where << ": exponent " << exponent << " overflows";
        throw RangeError(os.str());
    }
}

// g(x) = (e^{ax} - 1)/a - x = a x^2 h(ax).
double f_scalar(double a, double x)
{
    return a * x * x * detail::exp_remainder2(a * x);
}

SymTensor2 apply_divided(const Spectral2& sp, const std::array<double, 3>& phi, const SymTensor2& h)
{
    const SymTensor2 ht = sp.to_eigenbasis(h);
    return sp.from_eigenbasis({ht.xx * phi[0], ht.xy * phi[1], ht.yy * phi[2]});
}

SymTensor2 kappa_eigenbasis(double k, const SymTensor2& dt)
{
    return {0.0, dt.xy * k, 0.0};
}

SymTensor2 dkappa_eigenbasis(double kp, double q, const SymTensor2& dt, const SymTensor2& bt)
{
    const double m11 = -q * bt.xy * dt.xy;
    const double m22 = q * bt.xy * dt.xy;
    const double m12 = 0.5 * kp * dt.xy * (bt.xx - bt.yy) + 0.5 * q * bt.xy * (dt.yy - dt.xx);
    return {m11, m12, m22};
}

}  // namespace

SymTensor2 mat_exp_sym(const SymTensor2& t)
{
    const Spectral2 sp = eig_sym2(t);
    check_exponent(sp.eig1, "mat_exp_sym");
    return sp.compose(std::exp(sp.eig1), std::exp(sp.eig2));
}

SymTensor2 mat_log_spd(const SymTensor2& t)
{
    const Spectral2 sp = eig_sym2(t);
    if (!(sp.eig2 > 0.0)) {
        std::ostringstream os;
        os << "mat_log_spd: tensor is not SPD (eigenvalue " << sp.eig2 << ")";
        throw DomainError(os.str(), sp.eig2);
    }
    return sp.compose(std::log(sp.eig1), std::log(sp.eig2));
}

SymTensor2 fn_f(double a, const SymTensor2& chi)
{
    if (a < 0.0) {
        throw std::invalid_argument("fn_f: a must be >= 0");
    }
    if (a == 0.0) {
        return {};
    }
    const Spectral2 sp = eig_sym2(chi);
    check_exponent(a * sp.eig1, "fn_f");
    return sp.compose(f_scalar(a, sp.eig1), f_scalar(a, sp.eig2));
}

SymTensor2 fn_kappa(const SymTensor2& beta_t, const SymTensor2& d)
{
    const Spectral2 sp = eig_sym2(beta_t);
    const double x = 0.5 * (sp.eig1 - sp.eig2);
    return sp.from_eigenbasis(kappa_eigenbasis(detail::kappa_coeff(x), sp.to_eigenbasis(d)));
}

SymTensor2 dfn_f(double a, const SymTensor2& chi, const SymTensor2& dir)
{
    if (a < 0.0) {
        throw std::invalid_argument("dfn_f: a must be >= 0");
    }
    if (a == 0.0) {
        return {};
    }
    const Spectral2 sp = eig_sym2(chi);
    check_exponent(a * sp.eig1, "dfn_f");
    const std::array<double, 3> phi{std::expm1(a * sp.eig1), detail::f_divided_difference(a, sp.eig1, sp.eig2),
                                    std::expm1(a * sp.eig2)};
    return apply_divided(sp, phi, dir);
}

SymTensor2 d2fn_f(double a, const SymTensor2& chi, const SymTensor2& h, const SymTensor2& k)
{
    if (a < 0.0) {
        throw std::invalid_argument("d2fn_f: a must be >= 0");
    }
    if (a == 0.0) {
        return {};
    }
    const Spectral2 sp = eig_sym2(chi);
    check_exponent(a * sp.eig1, "d2fn_f");
    const double e1 = std::exp(a * sp.eig1);
    const double e2 = std::exp(a * sp.eig2);
    const double t = a * (sp.eig1 - sp.eig2);
    // Second divided differences of g on the eigenvalue triples.
    const double g111 = 0.5 * a * e1;
    const double g222 = 0.5 * a * e2;
    const double g112 = a * e1 * detail::exp_remainder2(-t);
    const double g122 = a * e2 * detail::exp_remainder2(t);
    const SymTensor2 ht = sp.to_eigenbasis(h);
    const SymTensor2 kt = sp.to_eigenbasis(k);
    const double cross = ht.xy * kt.xy;
    const SymTensor2 mt{2.0 * g111 * ht.xx * kt.xx + 2.0 * g112 * cross,
                        g112 * (ht.xx * kt.xy + kt.xx * ht.xy) + g122 * (ht.xy * kt.yy + kt.xy * ht.yy),
                        2.0 * g222 * ht.yy * kt.yy + 2.0 * g122 * cross};
    return sp.from_eigenbasis(mt);
}

SymTensor2 dfn_kappa(const SymTensor2& beta_t, const SymTensor2& d, const SymTensor2& dir)
{
    const Spectral2 sp = eig_sym2(beta_t);
    const double x = 0.5 * (sp.eig1 - sp.eig2);
    const SymTensor2 mt = dkappa_eigenbasis(detail::kappa_coeff_prime(x), detail::kappa_coeff_over_x(x),
                                            sp.to_eigenbasis(d), sp.to_eigenbasis(dir));
    return sp.from_eigenbasis(mt);
}

SymTensor2 sigma_from_chi(const PhysicalParams& p, const SymTensor2& chi)
{
    const double a = p.a();
    if (a == 0.0) {
        return chi;
    }
    const Spectral2 sp = eig_sym2(chi);
    check_exponent(a * sp.eig1, "sigma_from_chi");
    return sp.compose(std::expm1(a * sp.eig1) / a, std::expm1(a * sp.eig2) / a);
}

SymTensor2 chi_from_sigma(const PhysicalParams& p, const SymTensor2& sigma)
{
    const double a = p.a();
    if (a == 0.0) {
        return sigma;
    }
    const Spectral2 sp = eig_sym2(sigma);
    const double lowest = 1.0 + a * sp.eig2;
    if (!(lowest > 0.0)) {
        std::ostringstream os;
        os << "chi_from_sigma: (lambda/eta_p) sigma + I is not SPD (eigenvalue " << lowest << ")";
        throw DomainError(os.str(), lowest);
    }
    return sp.compose(std::log1p(a * sp.eig1) / a, std::log1p(a * sp.eig2) / a);
}

ConstitutivePoint::ConstitutivePoint(double a, const SymTensor2& chi) : a_(a), spec_(eig_sym2(chi))
{
    const double l1 = spec_.eig1;
    const double l2 = spec_.eig2;
    if (a_ > 0.0) {
        check_exponent(a_ * l1, "ConstitutivePoint");
        check_exponent(-a_ * l2, "ConstitutivePoint");
        phi_plus_ = {std::expm1(a_ * l1), detail::f_divided_difference(a_, l1, l2), std::expm1(a_ * l2)};
        phi_minus_ = {std::expm1(-a_ * l1), detail::f_divided_difference(a_, -l1, -l2), std::expm1(-a_ * l2)};
        g_plus_ = {f_scalar(a_, l1), f_scalar(a_, l2)};
        g_minus_ = {f_scalar(a_, -l1), f_scalar(a_, -l2)};
    }
    const double x = 0.5 * a_ * (l1 - l2);
    k_ = detail::kappa_coeff(x);
    k_over_x_ = detail::kappa_coeff_over_x(x);
    k_prime_ = detail::kappa_coeff_prime(x);
}

SymTensor2 ConstitutivePoint::f_plus() const { return spec_.compose(g_plus_[0], g_plus_[1]); }
SymTensor2 ConstitutivePoint::f_minus() const { return spec_.compose(g_minus_[0], g_minus_[1]); }

SymTensor2 ConstitutivePoint::df_plus(const SymTensor2& h) const { return apply_divided(spec_, phi_plus_, h); }
SymTensor2 ConstitutivePoint::df_minus(const SymTensor2& h) const { return apply_divided(spec_, phi_minus_, h); }

SymTensor2 ConstitutivePoint::kappa(const SymTensor2& d) const
{
    return spec_.from_eigenbasis(kappa_eigenbasis(k_, spec_.to_eigenbasis(d)));
}

SymTensor2 ConstitutivePoint::dkappa(const SymTensor2& d, const SymTensor2& h) const
{
    return spec_.from_eigenbasis(
        dkappa_eigenbasis(k_prime_, k_over_x_, spec_.to_eigenbasis(d), spec_.to_eigenbasis(h)));
}

}  // namespace logconf
