#pragma once

#include <string_view>

#include "signet/preprocess/types.hpp"

namespace signet::preprocess {

inline constexpr std::string_view kNetdiscoKeys[] = {"manufacturer", "model", "device_type", "friendly_name"};

/// Maps a raw mDNS/SSDP/UPnP key onto one of kNetdiscoKeys, or returns an
/// empty view when the key is volatile or unknown.
///
///   manufacturer  <- manufacturer, mfr, mfg, maker, vendor, brand
///   model         <- model, model_name, modelname, md, product
///   device_type   <- device_type, devicetype, type, st, nt, category
///   friendly_name <- friendly_name, friendlyname, fn, name
///
/// Keys are compared after lowercasing and mapping '-', ' ', '.' to '_'.
/// A key is volatile when any underscore-delimited word starts with one of
/// {serial, uuid, ip, host, mac, port} (so "serialNumber" and "ip_addr" too).
std::string_view normalize_netdisco_key(std::string_view raw_key);

/// Keeps persistent identifiers only. Values that are empty or IP literals are
/// dropped. When several raw keys map onto the same identifier, the exact
/// canonical key wins, then the lexicographically smallest raw key.
NetdiscoMap parse_netdisco(const NetdiscoMap& blob);

/// Decodes a JSON object (or a JSON string holding one) into a raw map.
/// Scalars are stringified; nested values are skipped. Unparseable -> empty.
NetdiscoMap decode_netdisco_blob(std::string_view json_text);

}  // namespace signet::preprocess
