#ifndef COMBOPT_ERROR_HPP
#define COMBOPT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace combopt {

// All library failures carry a short machine-readable kind
// ("DuplicateLabel", "DimMismatch", ...) plus a human message.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& msg)
      : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

private:
  std::string kind_;
};

}  // namespace combopt

#endif
