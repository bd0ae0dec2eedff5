#include "signet/error.hpp"

namespace signet {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::DecodeError: return "DecodeError";
        case Errc::ConfigError: return "ConfigError";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::InvalidHostname: return "InvalidHostname";
        case Errc::HostnameIsPublicSuffix: return "HostnameIsPublicSuffix";
        case Errc::EmptyTable: return "EmptyTable";
        case Errc::EmptyGroup: return "EmptyGroup";
        case Errc::NoGroups: return "NoGroups";
        case Errc::AlphaOutOfRange: return "AlphaOutOfRange";
        case Errc::InsufficientData: return "InsufficientData";
        case Errc::EmptySignature: return "EmptySignature";
        case Errc::MalformedResponse: return "MalformedResponse";
        case Errc::PlaceholderResponse: return "PlaceholderResponse";
        case Errc::TransportError: return "TransportError";
        case Errc::AuthError: return "AuthError";
        case Errc::RateLimited: return "RateLimited";
        case Errc::NoLabels: return "NoLabels";
        case Errc::MissingWeight: return "MissingWeight";
        case Errc::MissingRubricComponent: return "MissingRubricComponent";
        case Errc::NotApplicable: return "NotApplicable";
        case Errc::FractionOutOfRange: return "FractionOutOfRange";
        case Errc::SpanNotFound: return "SpanNotFound";
    }
    return "Unknown";
}

}  // namespace signet
