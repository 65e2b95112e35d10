#pragma once

#include <cmath>
#include <span>
#include <string_view>

namespace ghne {

using Scalar = double;

namespace detail {
inline bool is_exact_pivot(Scalar v) noexcept {
  return v == 0.0 || v == 0.5 || v == 1.0;
}
}  // namespace detail

/// Generalized hamming distance a + b - 2ab.
///
/// Bitwise commutative. When either operand is 0, 0.5 or 1 the result is the
/// exactly rounded identity (b), absorption (0.5) or negation (1 - b).
inline Scalar ghd(Scalar a, Scalar b) noexcept {
  if (detail::is_exact_pivot(a)) return a + b * (1.0 - 2.0 * a);
  if (detail::is_exact_pivot(b)) return b + a * (1.0 - 2.0 * b);
  return std::fma(-2.0 * a, b, a + b);
}

/// Left fold of ghd. Throws InvalidArgument on an empty sequence.
Scalar ghd_fold(std::span<const Scalar> values);

/// Arithmetic mean of elementwise ghd(w_l, x_l).
Scalar mean_ghd(std::span<const Scalar> w, std::span<const Scalar> x);

/// The bias b with (2/L)(w.x + b) == -mean_ghd(w, x).
Scalar analytic_bias(std::span<const Scalar> w, std::span<const Scalar> x);

/// ghd(u, u) = 2u(1 - u); maximal (0.5) at u = 0.5.
inline Scalar fuzziness(Scalar u) noexcept { return ghd(u, u); }

/// Throws InvalidArgument naming `what` if any value is NaN or infinite.
void require_finite(std::span<const Scalar> values, std::string_view what);

}  // namespace ghne
