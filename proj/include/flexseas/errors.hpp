#pragma once

#include <stdexcept>
#include <string>

namespace flexseas {

/// Base class of every error thrown by this library. The what() string of
/// each subclass starts with the class name, e.g. "DimensionError: ...",
/// which is what the CLI prints on its error stream.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
struct raw_message_t {};
}  // namespace detail

#define FLEXSEAS_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& msg)                            \
        : Error(std::string(#Name ": ") + msg) {}                    \
    Name(detail::raw_message_t, const std::string& full_message)     \
        : Error(full_message) {}                                     \
  };

FLEXSEAS_DEFINE_ERROR(BandwidthError)
FLEXSEAS_DEFINE_ERROR(DimensionError)
FLEXSEAS_DEFINE_ERROR(DomainError)
FLEXSEAS_DEFINE_ERROR(ConstraintError)
FLEXSEAS_DEFINE_ERROR(DegenerateWindow)
FLEXSEAS_DEFINE_ERROR(ConfigError)
FLEXSEAS_DEFINE_ERROR(SpecError)
FLEXSEAS_DEFINE_ERROR(SummabilityError)

#undef FLEXSEAS_DEFINE_ERROR

/// Rethrows the same error type with extra context appended to the message.
template <class E>
[[noreturn]] void rethrow_with_context(const E& e, const std::string& suffix) {
  throw E(detail::raw_message_t{}, std::string(e.what()) + " " + suffix);
}

}  // namespace flexseas
