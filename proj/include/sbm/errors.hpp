#pragma once

#include <stdexcept>
#include <string>

namespace sbm {

// Raised when an enumeration or simulation exceeds its configured work budget.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sbm
