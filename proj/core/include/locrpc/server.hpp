#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "locrpc/closure.hpp"

namespace locrpc::net {

struct ServerOptions {
  // Exposes GET /debug/sessions ({"open": <n>}); switch off in production.
  bool debug_endpoints = true;
};

// HTTP host for the server half of a store. POST /rpc takes one WireRequest
// per exchange and answers with one WireResponse. Under enc nothing survives
// a response; under state, pending server stacks live in a session table
// keyed by server-issued decimal ids. Statuses: 400 undecodable, 404 unknown
// function, 409 unknown or busy session, 500 stuck evaluation.
class RpcServer {
 public:
  explicit RpcServer(cs::FunctionStore store, ServerOptions options = {});
  ~RpcServer();

  RpcServer(const RpcServer&) = delete;
  RpcServer& operator=(const RpcServer&) = delete;

  // Binds and serves; blocks until stop(). False when the bind fails.
  bool listen(const std::string& host, int port);

  // Binds an ephemeral port and returns it (-1 on failure); follow with
  // serve_bound() on a worker thread.
  int bind_any(const std::string& host);
  bool serve_bound();

  bool wait_ready(int timeout_ms = 5000) const;
  void stop();

  // Current session-table size. Always 0 under enc.
  std::size_t open_sessions() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace locrpc::net
