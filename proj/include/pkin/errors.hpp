#ifndef PKIN_ERRORS_HPP
#define PKIN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pkin {

// Input outside an operation's mathematical domain (composite where a prime
// is required, zero distance, B-member passed to a cousin search, ...).
class domain_error : public std::domain_error {
 public:
  explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

// Request exceeds a configured resource ceiling (sieve memory, etc).
class resource_error : public std::runtime_error {
 public:
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// Persisted data failed validation (bad magic, checksum, truncation).
class data_error : public std::runtime_error {
 public:
  explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pkin

#endif  // PKIN_ERRORS_HPP
