#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "signet/labeling/prompt.hpp"
#include "signet/labeling/types.hpp"

namespace signet::labeling {

struct ParsedResponse {
    std::string explanation;
    std::optional<std::string> device_type;
    std::string vendor;  // empty only for type-target responses
};

/// Extracts explanation, device type and vendor from a completion. Accepts a
/// JSON object with "Explanation"/"Vendor"/"Device Type" keys, the inline
/// "Device Type: X, Vendor: Y" line, and an "Explanation: ..." block followed
/// by that line. The first well-formed prediction wins, so repeated trailing
/// output is ignored.
///
/// Throws Error(PlaceholderResponse) when template placeholders are echoed
/// back and Error(MalformedResponse) when the target field is missing or cot is
/// on and there is no explanation.
ParsedResponse parse_response(std::string_view text, const PromptConfig& config,
                              PromptTarget target = PromptTarget::joint);

/// "Explanation: ...\nDevice Type: T, Vendor: V"; the explanation line is
/// dropped when empty and the type segment when absent.
std::string render_response(const PseudoLabel& label);

}  // namespace signet::labeling
