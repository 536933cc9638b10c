#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace forestslp {

// Lengths of grammar-compressed values grow exponentially in the grammar size.
using BigInt = boost::multiprecision::cpp_int;

}  // namespace forestslp
