#pragma once

#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

namespace mvls {

using Time = std::int64_t;
using Power = std::int64_t;
using Coord = std::int64_t;
using Area = std::int64_t;

using Rational = boost::rational<std::int64_t>;
using BigRational = boost::multiprecision::cpp_rational;

using ModuleId = std::size_t;

// 128-bit intermediate for overflow-free products of int64 quantities.
__extension__ typedef __int128 Wide;

// Convert any exact rational to double for display or acceptance tests.
double to_double(const Rational& r);
double to_double(const BigRational& r);

}  // namespace mvls
