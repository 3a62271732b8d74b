#pragma once

#include <stdexcept>
#include <string>

namespace wbst {

struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotFound : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace wbst
