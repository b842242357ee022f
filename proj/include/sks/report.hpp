#pragma once

// JSON reports. Every report starts with the config echo; the worker count
// and output directory are left out so reports compare byte for byte across
// machines and worker counts.

#include "sks/config.hpp"

#include <json.hpp>

#include <string>

namespace sks {

nlohmann::ordered_json config_echo(const RunConfig& cfg);

nlohmann::ordered_json validation_json(const RunConfig& cfg);
/// Constants pass and both noises are admissible.
bool validation_passes(const RunConfig& cfg);

nlohmann::ordered_json moments_json(const RunConfig& cfg,
                                    const MomentsResult& result);
nlohmann::ordered_json strong_order_json(const RunConfig& cfg,
                                         const StrongOrderResult& result);
nlohmann::ordered_json wong_zakai_json(const RunConfig& cfg,
                                       const WongZakaiResult& result);
nlohmann::ordered_json truncation_events_json(
    const RunConfig& cfg, const TruncationEventsResult& result);

/// Two-space indented dump with a trailing newline.
std::string dump(const nlohmann::ordered_json& j);

void write_text(const std::string& path, const std::string& text);

}  // namespace sks
