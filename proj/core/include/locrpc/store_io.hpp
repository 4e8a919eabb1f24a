#pragma once

#include <string>

#include "locrpc/closure.hpp"

namespace locrpc::cs {

// Store file format: a single JSON document
//   {"strategy": "enc"|"state", "main": <term>,
//    "client": {<name>: <fun>}, "server": {<name>: <fun>}}
// with terms encoded as {"t": "var"|"clo"|"const"|"app"|"req"|"call"|"ret"|
// "let", ...} and functions as {"fvs": [...], "loc": "c"|"s", "params":
// [...], "body": <term>}. Keys are emitted in sorted order, so output is
// byte-stable for a fixed store.
std::string store_to_json(const FunctionStore& store);

// Throws Error(DecodeError) on malformed documents and Error(MalformedStore)
// when the decoded store violates the store invariants.
FunctionStore store_from_json(const std::string& text);

void write_store_file(const FunctionStore& store, const std::string& path);
FunctionStore read_store_file(const std::string& path);

}  // namespace locrpc::cs
