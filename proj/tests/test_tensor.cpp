#include "logconf/oracle.hpp"
#include "logconf/tensor.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace logconf;
namespace orc = logconf::oracle;

namespace {

double max_abs_diff(const SymTensor2& a, const SymTensor2& b) { return (a - b).norm(); }

SymTensor2 fd_f(double a, const SymTensor2& chi, const SymTensor2& dir, double h)
{
    return (1.0 / (2.0 * h)) * (fn_f(a, chi + h * dir) - fn_f(a, chi - h * dir));
}

SymTensor2 fd_kappa(const SymTensor2& b, const SymTensor2& d, const SymTensor2& dir, double h)
{
    return (1.0 / (2.0 * h)) * (fn_kappa(b + h * dir, d) - fn_kappa(b - h * dir, d));
}

}  // namespace

TEST(SymTensor2, CheckedRejectsNonFinite)
{
    EXPECT_THROW(SymTensor2::checked(1.0, NAN, 0.0), std::invalid_argument);
    EXPECT_THROW(SymTensor2::checked(INFINITY, 0.0, 0.0), std::invalid_argument);
    EXPECT_NO_THROW(SymTensor2::checked(1.0, 2.0, 3.0));
}

TEST(EigSym2, DiagonalInput)
{
    const Spectral2 sp = eig_sym2({3.0, 0.0, 1.0});
    EXPECT_DOUBLE_EQ(sp.eig1, 3.0);
    EXPECT_DOUBLE_EQ(sp.eig2, 1.0);
    EXPECT_DOUBLE_EQ(sp.c, 1.0);
    EXPECT_DOUBLE_EQ(sp.s, 0.0);
}

TEST(EigSym2, OffDiagonalInput)
{
    const Spectral2 sp = eig_sym2({0.0, 1.0, 0.0});
    EXPECT_NEAR(sp.eig1, 1.0, 1e-15);
    EXPECT_NEAR(sp.eig2, -1.0, 1e-15);
    EXPECT_NEAR(std::abs(sp.c), std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(std::abs(sp.s), std::sqrt(0.5), 1e-15);
    // leading eigenvector (c, s) along +45 degrees
    EXPECT_GT(sp.c * sp.s, 0.0);
}

TEST(EigSym2, RandomReconstruction)
{
    std::mt19937_64 rng(1);
    for (int i = 0; i < 10000; ++i) {
        const SymTensor2 t = orc::random_sym(rng, std::pow(10.0, (i % 7) - 3));
        const Spectral2 sp = eig_sym2(t);
        ASSERT_GE(sp.eig1, sp.eig2);
        ASSERT_NEAR(sp.c * sp.c + sp.s * sp.s, 1.0, 1e-12);
        ASSERT_LT(max_abs_diff(sp.reconstruct(), t), 1e-12 * std::max(t.norm(), 1e-300));
    }
}

TEST(MatExp, Examples)
{
    EXPECT_LT(max_abs_diff(mat_exp_sym({}), SymTensor2::identity()), 1e-15);
    EXPECT_LT(max_abs_diff(mat_exp_sym({std::log(2.0), 0.0, std::log(3.0)}), {2.0, 0.0, 3.0}), 1e-14);
    EXPECT_THROW(mat_exp_sym({800.0, 0.0, 0.0}), RangeError);
}

TEST(MatExp, MatchesTaylorOracle)
{
    std::mt19937_64 rng(2);
    for (int i = 0; i < 1000; ++i) {
        const SymTensor2 t = orc::random_sym(rng, 3.0);
        const SymTensor2 ref = orc::exp_block(t, {}).value;
        ASSERT_LT(max_abs_diff(mat_exp_sym(t), ref), 1e-13 * ref.norm());
    }
}

TEST(MatLog, Examples)
{
    EXPECT_LT(mat_log_spd(SymTensor2::identity()).norm(), 1e-15);
    const double e = std::exp(1.0);
    EXPECT_LT(max_abs_diff(mat_log_spd({e, 0.0, e * e}), {1.0, 0.0, 2.0}), 1e-15);
}

TEST(MatLog, NonSpdCarriesEigenvalue)
{
    try {
        mat_log_spd({1.0, 0.0, -2.0});
        FAIL() << "expected DomainError";
    } catch (const DomainError& err) {
        EXPECT_DOUBLE_EQ(err.eigenvalue(), -2.0);
    }
    EXPECT_THROW(mat_log_spd({0.0, 0.0, 1.0}), DomainError);
}

TEST(MatLog, NearDefectiveIsStable)
{
    // Eigenvalues 1 + 1e-14 and 1 on a rotated basis: log ~ diag(1e-14, 0).
    const SymTensor2 t = orc::rotate({1.0 + 1e-14, 0.0, 1.0}, 0.3);
    const SymTensor2 l = mat_log_spd(t);
    ASSERT_TRUE(l.is_finite());
    const SymTensor2 ref = orc::rotate({std::log1p(1e-14), 0.0, 0.0}, 0.3);
    EXPECT_LT(max_abs_diff(l, ref), 1e-15);
}

TEST(MatLog, RoundTrip)
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
        const SymTensor2 t = orc::random_sym(rng, 5.0);
        ASSERT_LT(max_abs_diff(mat_log_spd(mat_exp_sym(t)), t), 1e-10);
    }
}

TEST(FnF, Examples)
{
    const SymTensor2 chi{0.4, -0.7, 1.2};
    EXPECT_EQ(fn_f(0.0, chi).norm(), 0.0);
    EXPECT_EQ(fn_f(2.5, {}).norm(), 0.0);
    const SymTensor2 got = fn_f(1.0, {std::log(2.0), 0.0, std::log(3.0)});
    EXPECT_LT(max_abs_diff(got, {1.0 - std::log(2.0), 0.0, 2.0 - std::log(3.0)}), 1e-15);
    EXPECT_THROW(fn_f(-1.0, chi), std::invalid_argument);
    EXPECT_THROW(fn_f(10.0, {100.0, 0.0, 0.0}), RangeError);
}

TEST(FnF, SmallArgumentHasNoCancellation)
{
    // f(a, x) = a x^2 / 2 + O(x^3) for scalar x.
    const double x = 1e-9;
    const SymTensor2 got = fn_f(2.0, {x, 0.0, -x});
    EXPECT_NEAR(got.xx / (x * x), 1.0, 1e-8);
    EXPECT_NEAR(got.yy / (x * x), 1.0, 1e-8);
}

TEST(FnKappa, Examples)
{
    const SymTensor2 d{0.3, -1.1, 2.0};
    EXPECT_EQ(fn_kappa({}, d).norm(), 0.0);
    EXPECT_LT(fn_kappa({2.0, 0.0, -1.0}, {5.0, 0.0, -3.0}).norm(), 1e-16);
    const SymTensor2 k = fn_kappa({2.0, 0.0, 0.0}, {0.0, 1.0, 0.0});
    EXPECT_NEAR(k.xy, 1.0 - 1.0 / std::tanh(1.0), 1e-15);
    EXPECT_NEAR(k.xy, -0.313035, 1e-6);
    EXPECT_EQ(k.xx, 0.0);
    EXPECT_EQ(k.yy, 0.0);
}

TEST(FnKappa, LinearInD)
{
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; ++i) {
        const SymTensor2 b = orc::random_sym(rng, 3.0);
        const SymTensor2 d1 = orc::random_sym(rng, 1.0);
        const SymTensor2 d2 = orc::random_sym(rng, 1.0);
        const SymTensor2 lhs = fn_kappa(b, 2.0 * d1 - 3.0 * d2);
        const SymTensor2 rhs = 2.0 * fn_kappa(b, d1) - 3.0 * fn_kappa(b, d2);
        ASSERT_LT(max_abs_diff(lhs, rhs), 1e-14);
    }
}

TEST(FnKappa, ZeroDiagonalInEigenbasis)
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const SymTensor2 b = orc::random_sym(rng, 3.0);
        const SymTensor2 k = fn_kappa(b, orc::random_sym(rng, 1.0));
        const SymTensor2 kt = eig_sym2(b).to_eigenbasis(k);
        ASSERT_LT(std::abs(kt.xx) + std::abs(kt.yy), 1e-14);
    }
}

TEST(DfnF, Examples)
{
    const SymTensor2 dir{1.0, 2.0, -0.5};
    EXPECT_EQ(dfn_f(0.0, {1.0, 0.2, 0.3}, dir).norm(), 0.0);
    EXPECT_EQ(dfn_f(3.0, {}, dir).norm(), 0.0);
}

TEST(DfnF, MatchesBlockExponential)
{
    // Df(a, chi)[H] = Dexp(a chi)[H] - H.
    std::mt19937_64 rng(6);
    for (int i = 0; i < 1000; ++i) {
        const double a = 0.05 + 3.0 * (i % 10) / 10.0;
        const SymTensor2 chi = orc::random_sym(rng, 1.0);
        const SymTensor2 dir = orc::random_sym(rng, 1.0);
        const SymTensor2 ref = orc::exp_block(a * chi, dir).derivative - dir;
        ASSERT_LT(max_abs_diff(dfn_f(a, chi, dir), ref), 1e-12 * std::max(1.0, ref.norm())) << i;
    }
}

TEST(DfnF, MatchesCentralDifferences)
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const double a = 0.1 + 2.0 * (i % 13) / 13.0;
        const SymTensor2 chi = orc::random_sym(rng, 1.0);
        const SymTensor2 dir = orc::random_sym(rng, 1.0);
        const SymTensor2 exact = dfn_f(a, chi, dir);
        const SymTensor2 fd = fd_f(a, chi, dir, 1e-6);
        ASSERT_LT(max_abs_diff(exact, fd), 1e-6 * std::max(exact.norm(), 1e-2)) << i;
    }
}

TEST(D2fnF, MatchesCentralDifferencesOfDerivative)
{
    std::mt19937_64 rng(8);
    for (int i = 0; i < 500; ++i) {
        const double a = 0.1 + 2.0 * (i % 11) / 11.0;
        SymTensor2 chi = orc::random_sym(rng, 1.0);
        if (i % 5 == 0) chi = {0.3, 1e-9, 0.3};  // nearly coincident eigenvalues
        const SymTensor2 h = orc::random_sym(rng, 1.0);
        const SymTensor2 k = orc::random_sym(rng, 1.0);
        const double step = 1e-5;
        const SymTensor2 fd =
            (1.0 / (2.0 * step)) * (dfn_f(a, chi + step * k, h) - dfn_f(a, chi - step * k, h));
        const SymTensor2 exact = d2fn_f(a, chi, h, k);
        ASSERT_LT(max_abs_diff(exact, fd), 1e-6 * std::max(exact.norm(), 1e-2)) << i;
        // symmetric bilinear form
        ASSERT_LT(max_abs_diff(exact, d2fn_f(a, chi, k, h)), 1e-13 * std::max(exact.norm(), 1.0));
    }
}

TEST(DfnKappa, Examples)
{
    const SymTensor2 d{0.3, -1.1, 2.0};
    EXPECT_EQ(dfn_kappa({1.0, 0.5, 0.0}, d, {}).norm(), 0.0);
    // At the origin kappa is quadratic in beta, so the derivative vanishes.
    const SymTensor2 dir{0.7, -0.2, 0.4};
    const SymTensor2 fd = fd_kappa({}, d, dir, 1e-6);
    EXPECT_LT(max_abs_diff(dfn_kappa({}, d, dir), fd), 1e-9);
}

TEST(DfnKappa, MatchesCentralDifferences)
{
    std::mt19937_64 rng(9);
    for (int i = 0; i < 1000; ++i) {
        const SymTensor2 b = orc::random_sym(rng, 3.0);
        const SymTensor2 d = orc::random_sym(rng, 1.0);
        const SymTensor2 dir = orc::random_sym(rng, 1.0);
        const SymTensor2 exact = dfn_kappa(b, d, dir);
        const SymTensor2 fd = fd_kappa(b, d, dir, 1e-6);
        ASSERT_LT(max_abs_diff(exact, fd), 1e-5 * std::max(exact.norm(), 1e-2)) << i;
    }
}

TEST(Kernels, FrameInvariance)
{
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    for (int i = 0; i < 1000; ++i) {
        const double q = angle(rng);
        const SymTensor2 chi = orc::random_sym(rng, 2.0);
        const SymTensor2 d = orc::random_sym(rng, 1.0);
        const double a = 0.7;
        ASSERT_LT(max_abs_diff(fn_f(a, orc::rotate(chi, q)), orc::rotate(fn_f(a, chi), q)), 1e-12);
        ASSERT_LT(max_abs_diff(fn_kappa(orc::rotate(chi, q), orc::rotate(d, q)), orc::rotate(fn_kappa(chi, d), q)),
                  1e-12);
    }
}

TEST(Kernels, ContinuityAcrossSeriesSwitches)
{
    using namespace logconf::detail;
    for (double x0 : {0.1, -0.1}) {
        const double lo = std::nextafter(x0, 0.0);
        const double hi = x0;
        EXPECT_NEAR(kappa_coeff(lo), kappa_coeff(hi), 1e-12);
        EXPECT_NEAR(kappa_coeff_over_x(lo), kappa_coeff_over_x(hi), 1e-12);
        EXPECT_NEAR(kappa_coeff_prime(lo), kappa_coeff_prime(hi), 1e-12);
    }
    EXPECT_NEAR(kappa_coeff_prime(20.0), kappa_coeff_prime(std::nextafter(20.0, 30.0)), 1e-13);
    for (double z0 : {0.5, -0.5}) {
        EXPECT_NEAR(sinhc_minus_one(std::nextafter(z0, 0.0)), sinhc_minus_one(z0), 1e-15);
    }
    for (double z0 : {0.1, -0.1}) {
        EXPECT_NEAR(exp_remainder2(std::nextafter(z0, 0.0)), exp_remainder2(z0), 1e-15);
    }
    // f divided difference around the |z| = 20 switch
    const double a = 2.0;
    EXPECT_NEAR(f_divided_difference(a, std::nextafter(10.0, 20.0), -10.0), f_divided_difference(a, 10.0, -10.0),
                1e-14 * f_divided_difference(a, 10.0, -10.0));
}

TEST(Kernels, SmoothOverSmallEigenvalueGap)
{
    // Sweep the eigenvalue gap of beta over [0, 1e-3].  Second differences
    // of kappa and both derivatives must stay below 1e-8 (no jumps).
    const SymTensor2 d{0.2, 0.9, -0.4};
    const SymTensor2 dir{0.5, -0.3, 0.8};
    std::array<SymTensor2, 3> k, dk, df;
    for (int i = 0; i <= 1000; ++i) {
        const double gap = 1e-3 * i / 1000.0;
        const SymTensor2 b = orc::rotate({0.5 + gap, 0.0, 0.5}, 0.4);
        k = {k[1], k[2], fn_kappa(b, d)};
        dk = {dk[1], dk[2], dfn_kappa(b, d, dir)};
        df = {df[1], df[2], dfn_f(1.3, b, dir)};
        if (i > 1) {
            ASSERT_LT((k[2] - 2.0 * k[1] + k[0]).norm(), 1e-8) << gap;
            ASSERT_LT((dk[2] - 2.0 * dk[1] + dk[0]).norm(), 1e-8) << gap;
            ASSERT_LT((df[2] - 2.0 * df[1] + df[0]).norm(), 1e-8) << gap;
        }
    }
}

TEST(Kernels, SeriesMatchesClosedFormInOverlap)
{
    // Compare both branches of k, k/x, k' slightly inside the series region.
    for (double x : {0.02, 0.05, 0.09}) {
        const long double xl = x;
        const long double k = 1.0L - xl / std::tanh(xl);
        const long double sh = std::sinh(xl);
        const long double kp = -1.0L / std::tanh(xl) + xl / (sh * sh);
        EXPECT_NEAR(detail::kappa_coeff(x), static_cast<double>(k), 1e-15);
        EXPECT_NEAR(detail::kappa_coeff_over_x(x), static_cast<double>(k / xl), 1e-14);
        EXPECT_NEAR(detail::kappa_coeff_prime(x), static_cast<double>(kp), 1e-13);
    }
}

TEST(SigmaChi, Examples)
{
    PhysicalParams p{0.0, 1.0, 0.5, 0.0};
    const SymTensor2 t{0.3, 0.1, -0.2};
    EXPECT_EQ(max_abs_diff(sigma_from_chi(p, t), t), 0.0);
    EXPECT_EQ(max_abs_diff(chi_from_sigma(p, t), t), 0.0);
    p.lambda = 0.8;
    EXPECT_EQ(sigma_from_chi(p, {}).norm(), 0.0);
    EXPECT_EQ(chi_from_sigma(p, {}).norm(), 0.0);
    EXPECT_THROW(chi_from_sigma(p, {-10.0, 0.0, 1.0}), DomainError);
}

TEST(SigmaChi, MatchesDefinitionAndRoundTrips)
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        PhysicalParams p{0.0, 1.3, 0.3, 0.05 + 0.1 * (i % 20)};
        const SymTensor2 chi = orc::random_sym(rng, 2.0);
        const SymTensor2 sigma = sigma_from_chi(p, chi);
        ASSERT_LT(max_abs_diff(sigma, chi + fn_f(p.a(), chi)), 1e-12 * std::max(1.0, sigma.norm()));
        ASSERT_LT(max_abs_diff(chi_from_sigma(p, sigma), chi), 1e-10);
    }
}

TEST(PhysicalParams, Validate)
{
    PhysicalParams p{0.0, 1.0, 0.59, 0.3};
    EXPECT_NO_THROW(p.validate());
    EXPECT_NEAR(p.eta_solvent() + p.eta_polymer(), 1.0, 1e-15);
    p.beta = 1.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p.beta = 0.5;
    p.lambda = -1.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(ConstitutivePoint, AgreesWithFreeFunctions)
{
    std::mt19937_64 rng(12);
    for (int i = 0; i < 500; ++i) {
        const double a = 0.1 + 0.2 * (i % 10);
        const SymTensor2 chi = orc::random_sym(rng, 1.5);
        const SymTensor2 h = orc::random_sym(rng, 1.0);
        const SymTensor2 d = orc::random_sym(rng, 1.0);
        const ConstitutivePoint cp(a, chi);
        ASSERT_LT(max_abs_diff(cp.f_plus(), fn_f(a, chi)), 1e-13);
        ASSERT_LT(max_abs_diff(cp.f_minus(), fn_f(a, -chi)), 1e-13);
        ASSERT_LT(max_abs_diff(cp.df_plus(h), dfn_f(a, chi, h)), 1e-13);
        ASSERT_LT(max_abs_diff(cp.df_minus(h), dfn_f(a, -chi, h)), 1e-13);
        ASSERT_LT(max_abs_diff(cp.kappa(d), fn_kappa(a * chi, d)), 1e-13);
        ASSERT_LT(max_abs_diff(cp.dkappa(d, h), dfn_kappa(a * chi, d, h)), 1e-13);
    }
}

TEST(Equivalence, LogFormMatchesConformationForm)
{
    std::mt19937_64 rng(13);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const orc::EquivalenceSample s = orc::equivalence_draw(rng);
        worst = std::max(worst, s.error / s.scale);
    }
    EXPECT_LT(worst, 1e-9);
}

TEST(Equivalence, WrongKappaCoefficientIsDetected)
{
    // Sanity check of the oracle: dropping kappa must break the identity.
    std::mt19937_64 rng(14);
    PhysicalParams p{0.0, 1.0, 0.5, 1.0};
    const double a = p.a();
    const SymTensor2 c = (1.0 / a) * orc::rotate({std::exp(1.5), 0.0, std::exp(-0.5)}, 0.3);
    const orc::Mat2 l{0.3, 1.2, -0.4, -0.3};
    const SymTensor2 chi = chi_from_sigma(p, c - (1.0 / a) * SymTensor2::identity());
    const SymTensor2 eps{l.a11, 0.5 * (l.a12 + l.a21), l.a22};
    const double omega = 0.5 * (l.a12 - l.a21);
    const SymTensor2 h{};
    const SymTensor2 r_c = p.lambda * (-1.0 * orc::upper_convective(l, c)) + c - (1.0 / a) * SymTensor2::identity();
    const SymTensor2 r_chi_no_kappa = p.lambda * commutator_with_skew(chi, omega) + chi - fn_f(a, -chi) -
                                      2.0 * p.eta_polymer() * eps;
    const SymTensor2 image = orc::exp_block(a * chi, r_chi_no_kappa + h).derivative;
    EXPECT_GT((r_c - image).norm(), 1e-3);
}
