#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace baromocap {

// Base error carrying a stable machine-parseable code alongside the message.
// The CLI prints "error: <code>: <detail>" and maps codes to exit status.
class Error : public std::runtime_error {
public:
    Error(std::string code, std::string detail)
        : std::runtime_error(code + ": " + detail),
          code_(std::move(code)),
          detail_(std::move(detail)) {}

    const std::string& code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string code_;
    std::string detail_;
};

#define BAROMOCAP_DEFINE_ERROR(Name)                                       \
    class Name : public Error {                                            \
    public:                                                                \
        explicit Name(const std::string& detail) : Error(#Name, detail) {} \
    }

BAROMOCAP_DEFINE_ERROR(DegenerateInput);
BAROMOCAP_DEFINE_ERROR(NonMonotonicTime);
BAROMOCAP_DEFINE_ERROR(NotStationary);
BAROMOCAP_DEFINE_ERROR(DegenerateSpan);
BAROMOCAP_DEFINE_ERROR(ExcessiveMotion);
BAROMOCAP_DEFINE_ERROR(BadSampleSet);
BAROMOCAP_DEFINE_ERROR(ShapeMismatch);
BAROMOCAP_DEFINE_ERROR(LengthMismatch);
BAROMOCAP_DEFINE_ERROR(NonFiniteLoss);
BAROMOCAP_DEFINE_ERROR(TooShort);
BAROMOCAP_DEFINE_ERROR(CorruptFile);
BAROMOCAP_DEFINE_ERROR(VersionMismatch);
BAROMOCAP_DEFINE_ERROR(BadMagic);
BAROMOCAP_DEFINE_ERROR(BadVersion);
BAROMOCAP_DEFINE_ERROR(OutOfRange);
BAROMOCAP_DEFINE_ERROR(ConfigError);
BAROMOCAP_DEFINE_ERROR(IoError);

#undef BAROMOCAP_DEFINE_ERROR

}  // namespace baromocap
