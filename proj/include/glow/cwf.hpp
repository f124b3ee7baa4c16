#pragma once

#include "glow/laplace.hpp"

namespace glow {

// Per-interval constants of the weighted integral formulation. On interval
// (s_n, s_{n-1}) with weight C = exp[mu*(s - s_{n-1})] and I0 = integral of C:
//   A1 = (2/I0) * int [s^2 - 2 s (s_{n-1} - s)] C ds   (multiplies the q-gradient terms)
//   A2 = (2/I0) * int s C ds                           (multiplies the source term)
//   B  = (2/I0) * int [s^2 (s_{n-1}-s) - s (s_{n-1}-s)^2] C ds
// B scales the dropped quadratic term; it is only logged (B = O(1/mu)).
struct CwfCoeffs {
    double A1 = 0, A2 = 0, B = 0;
    double mu = 0, I0 = 0;
};

// Closed-form evaluation via exponential moments; n is the 1-based interval
// index (interval endpoints s_n, s_{n-1} of the ladder).
CwfCoeffs derive_coeffs(const Ladder& lad, int n, double mu = 20.0);

}  // namespace glow
