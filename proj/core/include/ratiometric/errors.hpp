#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ratiometric {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state component became NaN or infinite during integration.
class IntegrationDiverged : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration, schedule gaps, too-short input sequences.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Ratios were requested for a population with no cells.
class PopulationExtinct : public Error {
 public:
  using Error::Error;
};

using WarningSink = std::function<void(std::string_view)>;

/// Installs the process-wide warning sink and returns the previous one.
/// The default sink writes to std::clog.
WarningSink set_warning_sink(WarningSink sink);

void warn(std::string_view message);

}  // namespace ratiometric
