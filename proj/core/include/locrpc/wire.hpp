#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "locrpc/closure.hpp"

namespace locrpc::net {

// Messages carry closed values only: closures by name plus environment, and
// constants. Variables never travel.

struct ReqMsg {
  std::optional<std::string> session;  // state strategy with an open session
  cs::Value fun;
  std::vector<cs::Value> args;
};

struct RetMsg {
  std::string session;
  cs::Value value;
};

using WireRequest = std::variant<ReqMsg, RetMsg>;

struct ReplyMsg {
  std::optional<std::string> session;  // present only while a session stays open
  cs::Value value;
};

struct CallMsg {
  std::optional<std::string> session;
  cs::Value fun;
  std::vector<cs::Value> args;
};

using WireResponse = std::variant<ReplyMsg, CallMsg>;

// Canonical JSON bytes: sorted keys, no whitespace. encode/decode are a total
// inverse pair on valid messages; decode reports the byte offset of JSON
// errors and rejects open values.
std::string encode(const WireRequest& msg);
std::string encode(const WireResponse& msg);
WireRequest decode_request(const std::string& bytes);
WireResponse decode_response(const std::string& bytes);

}  // namespace locrpc::net
