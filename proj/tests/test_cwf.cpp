#include <cmath>
#include <functional>

#include "doctest.h"
#include "glow/cwf.hpp"

using namespace glow;

namespace {

// Composite Simpson on [a,b]; the integrands are smooth polynomials times an
// exponential over a 0.05-wide interval, so 2000 panels leave ~1e-15 error.
double simpson(const std::function<double(double)>& f, double a, double b, int panels = 2000) {
    const double h = (b - a) / (2 * panels);
    double acc = f(a) + f(b);
    for (int i = 1; i < 2 * panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + h * i);
    return acc * h / 3.0;
}

CwfCoeffs quadrature_coeffs(const Ladder& lad, int n, double mu) {
    const double b = lad.s(n - 1);  // interval (s_n, s_{n-1})
    const double lo = lad.s(n), hi = b;
    auto C = [&](double s) { return std::exp(mu * (s - b)); };
    CwfCoeffs c;
    c.mu = mu;
    c.I0 = simpson(C, lo, hi);
    c.A1 = 2.0 / c.I0 *
           simpson([&](double s) { return (s * s - 2.0 * s * (b - s)) * C(s); }, lo, hi);
    c.A2 = 2.0 / c.I0 * simpson([&](double s) { return s * C(s); }, lo, hi);
    c.B = 2.0 / c.I0 *
          simpson([&](double s) { return (s * s * (b - s) - s * (b - s) * (b - s)) * C(s); },
                  lo, hi);
    return c;
}

}  // namespace

TEST_CASE("first-interval constants at the default weight are pinned") {
    const Ladder lad = make_ladder(8.0, 10.0, 0.05);
    const CwfCoeffs c = derive_coeffs(lad, 1, 20.0);
    CHECK(c.A1 == doctest::Approx(198.33171787566815).epsilon(1e-12));
    CHECK(c.A2 == doctest::Approx(19.958197670686932).epsilon(1e-12));
    CHECK(c.B == doctest::Approx(4.142212565863632).epsilon(1e-12));
    CHECK(c.I0 == doctest::Approx((1.0 - std::exp(-1.0)) / 20.0).epsilon(1e-12));
}

TEST_CASE("closed forms agree with direct quadrature") {
    const Ladder lad = make_ladder(8.0, 10.0, 0.05);
    for (int n : {1, 7, 20, 40})
        for (double mu : {10.0, 20.0, 40.0}) {
            const CwfCoeffs c = derive_coeffs(lad, n, mu);
            const CwfCoeffs q = quadrature_coeffs(lad, n, mu);
            CAPTURE(n);
            CAPTURE(mu);
            CHECK(c.I0 == doctest::Approx(q.I0).epsilon(1e-10));
            CHECK(c.A1 == doctest::Approx(q.A1).epsilon(1e-10));
            CHECK(c.A2 == doctest::Approx(q.A2).epsilon(1e-10));
            CHECK(c.B == doctest::Approx(q.B).epsilon(1e-10));
        }
}

TEST_CASE("source constant stays inside its interval bracket") {
    const Ladder lad = make_ladder(8.0, 10.0, 0.05);
    for (int n = 1; n <= lad.intervals(); ++n) {
        const CwfCoeffs c = derive_coeffs(lad, n, 20.0);
        CAPTURE(n);
        CHECK(c.A2 > 2.0 * lad.s(n));
        CHECK(c.A2 < 2.0 * lad.s(n - 1));
    }
}

TEST_CASE("dropped-term scale shrinks like 1/mu") {
    const Ladder lad = make_ladder(8.0, 10.0, 0.05);
    for (int n = 1; n <= lad.intervals(); ++n) {
        CAPTURE(n);
        CHECK(derive_coeffs(lad, n, 40.0).B < derive_coeffs(lad, n, 20.0).B);
    }
    for (int n : {1, 15, 40})
        for (double mu : {10.0, 20.0}) {
            const double ratio = derive_coeffs(lad, n, mu).B / derive_coeffs(lad, n, 2 * mu).B;
            CAPTURE(n);
            CAPTURE(mu);
            CHECK(ratio > 1.5);
            CHECK(ratio < 2.5);
        }
}

TEST_CASE("large-weight limits concentrate at the interval top") {
    const Ladder lad = make_ladder(8.0, 10.0, 0.05);
    const CwfCoeffs c = derive_coeffs(lad, 1, 1e6);
    CHECK(c.A1 == doctest::Approx(200.0).epsilon(1e-4));
    CHECK(c.A2 == doctest::Approx(20.0).epsilon(1e-4));
    CHECK(c.B > 0.0);
    CHECK(c.B < 1e-3);
}

TEST_CASE("constant derivation rejects bad arguments") {
    const Ladder lad = make_ladder(8.0, 10.0, 0.05);
    CHECK_THROWS_AS(derive_coeffs(lad, 0, 20.0), ConfigError);
    CHECK_THROWS_AS(derive_coeffs(lad, 41, 20.0), ConfigError);
    CHECK_THROWS_AS(derive_coeffs(lad, 1, 0.0), ConfigError);
    CHECK_THROWS_AS(derive_coeffs(lad, 1, -5.0), ConfigError);
}
