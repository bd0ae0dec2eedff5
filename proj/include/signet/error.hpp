#pragma once

#include <chrono>
#include <stdexcept>
#include <string>
#include <string_view>

namespace signet {

enum class Errc {
    InvalidArgument,
    DecodeError,
    ConfigError,
    // preprocess
    EmptyInput,
    InvalidHostname,
    HostnameIsPublicSuffix,
    // attribution
    EmptyTable,
    EmptyGroup,
    NoGroups,
    AlphaOutOfRange,
    InsufficientData,
    // labeling
    EmptySignature,
    MalformedResponse,
    PlaceholderResponse,
    TransportError,
    AuthError,
    RateLimited,
    NoLabels,
    MissingWeight,
    // evaluation
    MissingRubricComponent,
    NotApplicable,
    // emitter
    FractionOutOfRange,
    SpanNotFound,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Raised by HTTP predictors on 429 once retries are exhausted.
class RateLimitedError : public Error {
public:
    RateLimitedError(const std::string& what, std::chrono::milliseconds retry_after)
        : Error(Errc::RateLimited, what), retry_after_(retry_after) {}

    std::chrono::milliseconds retry_after() const noexcept { return retry_after_; }

private:
    std::chrono::milliseconds retry_after_;
};

}  // namespace signet
