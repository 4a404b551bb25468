#pragma once

#include <stdexcept>
#include <string>

namespace sns {

/// Thrown when an integration produces non-finite coefficients.
class BlowUpError : public std::runtime_error {
  public:
    BlowUpError(std::string what, long step, long path = -1)
        : std::runtime_error(std::move(what)), step_(step), path_(path) {}

    long step() const { return step_; }
    long path() const { return path_; }

    BlowUpError with_path(long path) const {
        BlowUpError e(what(), step_, path);
        return e;
    }

  private:
    long step_;
    long path_;
};

}  // namespace sns
