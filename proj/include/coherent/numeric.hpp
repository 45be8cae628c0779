#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Core>

namespace coherent {

/// Exact rational scalar. Every value on the exact path (assessments, masses,
/// LP data, certificates, Brier scores) is one of these; no floating point.
using Rational =
    boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                  boost::multiprecision::et_off>;

/// High-precision binary float (128-bit mantissa, round-to-nearest-even)
/// for the quarantined approximate path: logarithmic scores and non-Brier
/// projections.
using HighFloat = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<128, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using RationalVector = Vector<Rational>;
using RationalMatrix = Matrix<Rational>;
using HighFloatVector = Vector<HighFloat>;
using HighFloatMatrix = Matrix<HighFloat>;

/// Parses "p/q", an integer, or a decimal literal ("0.25", "1e-3") into an
/// exact rational. Returns nullopt on malformed input or zero denominator.
std::optional<Rational> parse_rational(std::string_view text);

/// Canonical "p/q" form, e.g. "3/8", "0/1", "1/1". Inverse of parse_rational.
std::string format_rational(const Rational& value);

/// Exact conversion of the binary float into a rational.
Rational to_rational(const HighFloat& value);

/// Rounded conversion; exact when the denominator is a power of two.
HighFloat to_highfloat(const Rational& value);

/// Fixed-notation decimal rendering used by reports (deterministic digits).
std::string format_highfloat(const HighFloat& value, int digits = 24);

}  // namespace coherent
