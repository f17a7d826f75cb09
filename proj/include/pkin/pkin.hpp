#ifndef PKIN_PKIN_HPP
#define PKIN_PKIN_HPP

#include "pkin/census.hpp"
#include "pkin/classifier.hpp"
#include "pkin/config.hpp"
#include "pkin/core_arith.hpp"
#include "pkin/errors.hpp"
#include "pkin/nat.hpp"
#include "pkin/primality.hpp"
#include "pkin/reference_claims.hpp"
#include "pkin/report_format.hpp"
#include "pkin/search.hpp"
#include "pkin/segment_cache.hpp"
#include "pkin/sieve.hpp"
#include "pkin/wieferich.hpp"

#endif  // PKIN_PKIN_HPP
