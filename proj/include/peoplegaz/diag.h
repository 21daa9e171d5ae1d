#pragma once

#include <functional>
#include <string>

namespace peoplegaz {

// Process-wide warning sink. Defaults to stderr; tests install a capturing
// sink through ScopedWarningSink.
using WarningSink = std::function<void(const std::string&)>;

void warn(const std::string& message);
WarningSink set_warning_sink(WarningSink sink);

class ScopedWarningSink {
 public:
  explicit ScopedWarningSink(WarningSink sink)
      : previous_(set_warning_sink(std::move(sink))) {}
  ~ScopedWarningSink() { set_warning_sink(std::move(previous_)); }
  ScopedWarningSink(const ScopedWarningSink&) = delete;
  ScopedWarningSink& operator=(const ScopedWarningSink&) = delete;

 private:
  WarningSink previous_;
};

}  // namespace peoplegaz
