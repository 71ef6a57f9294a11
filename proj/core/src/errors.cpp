#include "rdspde/errors.hpp"

namespace rdspde {

namespace {

std::string blow_up_message(std::size_t step, double time) {
  return "non-finite state at step " + std::to_string(step) + " (t = " + std::to_string(time) + ")";
}

std::string config_message(const std::string& field, const std::string& message, int line) {
  std::string out;
  if (line > 0) out += "line " + std::to_string(line) + ": ";
  if (!field.empty()) out += "'" + field + "': ";
  return out + message;
}

}  // namespace

BlowUpError::BlowUpError(std::size_t step, double time)
    : NumericError(blow_up_message(step, time)), step_(step), time_(time) {}

ConfigError::ConfigError(std::string field, const std::string& message, int line)
    : std::runtime_error(config_message(field, message, line)), field_(std::move(field)), detail_(message), line_(line) {}

}  // namespace rdspde
