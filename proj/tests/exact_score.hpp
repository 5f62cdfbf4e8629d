#pragma once

namespace sizenet::testing {

// Reference confidence score for rational rates p = p_num / p_den:
// the binomial likelihood is built as an exact integer ratio and only the
// final logarithms run in 256-bit floating point, so the result is good to
// far beyond double precision. Requires 0 <= k <= n, 0 <= p_num <= p_den,
// and a likelihood greater than zero.
double exact_confidence_score(long n, long k, long p_num, long p_den);

}  // namespace sizenet::testing
