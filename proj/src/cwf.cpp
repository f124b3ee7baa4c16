#include "glow/cwf.hpp"

#include <cmath>

namespace glow {

// With x = s_{n-1} - s the weight becomes e^{-mu x} on (0, h] and the moments
// m_k = int_0^h x^k e^{-mu x} dx have the closed forms below; the coefficient
// integrands expand in x as
//   s^2 - 2 s (s_{n-1}-s) = b^2 - 4 b x + 3 x^2,
//   s                     = b - x,
//   s^2(s_{n-1}-s) - s(s_{n-1}-s)^2 = b^2 x - 3 b x^2 + 2 x^3,   b = s_{n-1}.
CwfCoeffs derive_coeffs(const Ladder& lad, int n, double mu) {
    if (n < 1 || n > lad.intervals()) throw ConfigError("interval index out of range");
    if (!(mu > 0.0)) throw ConfigError("weight parameter must be positive");
    const double b = lad.s(n - 1);
    const double h = lad.step;
    const double mh = mu * h;
    const double E = std::exp(-mh);
    const double m0 = (1.0 - E) / mu;
    const double m1 = (1.0 - E * (1.0 + mh)) / (mu * mu);
    const double m2 = (2.0 - E * (2.0 + 2.0 * mh + mh * mh)) / (mu * mu * mu);
    const double m3 = (6.0 - E * (6.0 + 6.0 * mh + 3.0 * mh * mh + mh * mh * mh)) /
                      (mu * mu * mu * mu);
    CwfCoeffs c;
    c.mu = mu;
    c.I0 = m0;
    c.A1 = 2.0 * (b * b * m0 - 4.0 * b * m1 + 3.0 * m2) / m0;
    c.A2 = 2.0 * (b * m0 - m1) / m0;
    c.B = 2.0 * (b * b * m1 - 3.0 * b * m2 + 2.0 * m3) / m0;
    return c;
}

}  // namespace glow
