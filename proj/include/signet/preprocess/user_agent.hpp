#pragma once

#include <set>
#include <string_view>

#include "signet/preprocess/types.hpp"

namespace signet::preprocess {

/// Classifies a single token by its product name against fixed tables
/// (os, browser, sdk, device-model patterns). Unknown products are `other`.
/// Classification depends only on the token text, never on its position.
UAKind classify_ua_token(std::string_view value);

/// True for build tags (`Build/...`) and commit-hash-like strings
/// (7-40 hex characters mixing digits and letters).
bool is_build_tag(std::string_view token);

/// Splits a User-Agent into product/version words and parenthesized comment
/// items (`;`-separated), drops build tags, and classifies each survivor.
std::set<UAToken> parse_user_agent(std::string_view ua);

}  // namespace signet::preprocess
