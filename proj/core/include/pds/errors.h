#ifndef PDS_ERRORS_H_
#define PDS_ERRORS_H_

#include <stdexcept>
#include <string>

namespace pds {

// Input failed a schema or precondition check.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string &what) : std::invalid_argument(what) {}
};

// A store or resource file could not be read or written.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string &what) : std::runtime_error(what) {}
};

// An operation was called outside its contract (e.g. alerting on a NO).
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string &what) : std::logic_error(what) {}
};

}  // namespace pds

#endif  // PDS_ERRORS_H_
