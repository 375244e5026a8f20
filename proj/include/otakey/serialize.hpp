#pragma once

// JSON views of channels, transcripts and eavesdropper reports. Big numbers
// are written as decimal strings so nothing is lost to doubles.

#include "json.hpp"

#include "otakey/adversary.hpp"
#include "otakey/channel.hpp"
#include "otakey/protocol.hpp"

namespace otakey {

using Json = nlohmann::ordered_json;

Json channel_to_json(const ChannelState& ch);
// Throws ParseError on malformed documents, NonPositiveGain on invalid gains.
ChannelState channel_from_json(const Json& doc);

Json fading_to_json(const FadingModel& model);
FadingModel fading_from_json(const Json& doc);

Json transcript_to_json(const ProtocolTranscript& t);
Json eve_report_to_json(const EveReport& r);

}  // namespace otakey
