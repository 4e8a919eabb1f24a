#include "locrpc/server.hpp"

#include <atomic>
#include <chrono>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "locrpc/machine_cs.hpp"
#include "locrpc/wire.hpp"

namespace locrpc::net {

namespace {

constexpr long kPhaseFuel = 1'000'000;

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DecodeError: return 400;
    case ErrorKind::UnknownFunction: return 404;
    case ErrorKind::UnknownSession: return 409;
    default: return 500;
  }
}

std::string error_body(ErrorKind kind, const std::string& message) {
  nlohmann::json doc{{"error", to_string(kind)}, {"message", message}};
  return doc.dump();
}

// Outcome of running one server phase to its next transfer of control.
struct PhaseEnd {
  bool is_call = false;
  cs::Value value;              // reply payload
  cs::Value call_fun;           // call payload
  std::vector<cs::Value> call_args;
};

}  // namespace

struct RpcServer::Impl {
  cs::FunctionStore store;
  ServerOptions options;
  httplib::Server http;

  std::mutex mu;
  std::map<std::string, std::vector<cs::Frame>> sessions;
  std::set<std::string> busy;
  std::atomic<long> next_sid{1};

  Impl(cs::FunctionStore s, ServerOptions o) : store(std::move(s)), options(o) {
    cs::validate_store(store);
    http.Post("/rpc", [this](const httplib::Request& req, httplib::Response& res) {
      handle(req, res);
    });
    if (options.debug_endpoints) {
      http.Get("/debug/sessions", [this](const httplib::Request&, httplib::Response& res) {
        std::lock_guard<std::mutex> lock(mu);
        nlohmann::json doc{{"open", sessions.size()}};
        res.set_content(doc.dump(), "application/json");
      });
    }
  }

  // Runs server-local steps until the term is a value (reply) or a call is
  // next. Uses the same machine as local runs; the placeholder frame stands
  // in for the remote client context and is never consulted by local rules.
  PhaseEnd run_phase(cs::TermPtr term, std::vector<cs::Frame>& stack) {
    cs::Machine machine(store);
    const bool stateful = store.strategy == anf::Strategy::State;
    cs::Frame placeholder{"x", cs::val(cs::vvar("x"))};
    long fuel = kPhaseFuel;
    for (;;) {
      if (const auto* v = std::get_if<cs::Term::Val>(&term->node)) {
        PhaseEnd end;
        end.value = v->value;
        return end;
      }
      if (!stateful) {
        if (const auto* cl = std::get_if<cs::Term::Call>(&term->node)) {
          PhaseEnd end;
          end.is_call = true;
          end.call_fun = cl->fun;
          end.call_args = cl->args;
          return end;
        }
      } else if (const auto* top = std::get_if<cs::Term::Let>(&term->node)) {
        if (const auto* cl = std::get_if<cs::Term::Call>(&top->bound->node)) {
          stack.push_back(cs::Frame{top->binder, top->body});
          PhaseEnd end;
          end.is_call = true;
          end.call_fun = cl->fun;
          end.call_args = cl->args;
          return end;
        }
      }
      if (fuel-- <= 0) throw Error(ErrorKind::FuelExhausted, "server phase budget exhausted");
      cs::Config config{term, cs::Frame{placeholder}, stack, 1};
      auto out = machine.step(config);
      term = out.config.term;
    }
  }

  void handle(const httplib::Request& req, httplib::Response& res) {
    std::string locked_sid;
    try {
      WireRequest msg = decode_request(req.body);
      WireResponse reply = store.strategy == anf::Strategy::Enc
                               ? handle_enc(msg)
                               : handle_state(msg, locked_sid);
      res.set_content(encode(reply), "application/json");
    } catch (const Error& e) {
      res.status = e.kind() == ErrorKind::ServerError && e.status() != 0 ? e.status()
                                                                         : status_for(e.kind());
      res.set_content(error_body(e.kind(), e.what()), "application/json");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(error_body(ErrorKind::Stuck, e.what()), "application/json");
    }
    if (!locked_sid.empty()) {
      std::lock_guard<std::mutex> lock(mu);
      busy.erase(locked_sid);
    }
  }

  WireResponse handle_enc(const WireRequest& msg) {
    const auto* r = std::get_if<ReqMsg>(&msg);
    if (r == nullptr)
      throw Error(ErrorKind::DecodeError, "ret is not part of the state-encoding protocol");
    std::vector<cs::Frame> no_stack;
    PhaseEnd end = run_phase(cs::app(r->fun, r->args), no_stack);
    if (end.is_call) return CallMsg{std::nullopt, end.call_fun, end.call_args};
    return ReplyMsg{std::nullopt, end.value};
  }

  WireResponse handle_state(const WireRequest& msg, std::string& locked_sid) {
    std::string sid;
    std::vector<cs::Frame> stack;
    cs::TermPtr term;

    if (const auto* r = std::get_if<ReqMsg>(&msg)) {
      if (r->session) {
        sid = *r->session;
        stack = take_session(sid, locked_sid);
      } else {
        sid = std::to_string(next_sid.fetch_add(1));
      }
      term = cs::let("r", cs::app(r->fun, r->args), cs::val(cs::vvar("r")));
    } else {
      const auto& ret_msg = std::get<RetMsg>(msg);
      sid = ret_msg.session;
      stack = take_session(sid, locked_sid);
      cs::Frame top = stack.back();
      stack.pop_back();
      term = cs::let(top.binder, cs::val(ret_msg.value), top.body);
    }

    PhaseEnd end = run_phase(term, stack);
    if (end.is_call) {
      put_session(sid, std::move(stack));
      return CallMsg{sid, end.call_fun, end.call_args};
    }
    if (stack.empty()) {
      drop_session(sid);
      return ReplyMsg{std::nullopt, end.value};
    }
    put_session(sid, std::move(stack));
    return ReplyMsg{sid, end.value};
  }

  std::vector<cs::Frame> take_session(const std::string& sid, std::string& locked_sid) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = sessions.find(sid);
    if (it == sessions.end())
      throw Error(ErrorKind::UnknownSession, "no session '" + sid + "'", {}, 409);
    if (!busy.insert(sid).second)
      throw Error(ErrorKind::UnknownSession, "session '" + sid + "' has a request in flight",
                  {}, 409);
    locked_sid = sid;
    return it->second;
  }

  void put_session(const std::string& sid, std::vector<cs::Frame> stack) {
    std::lock_guard<std::mutex> lock(mu);
    sessions[sid] = std::move(stack);
  }

  void drop_session(const std::string& sid) {
    std::lock_guard<std::mutex> lock(mu);
    sessions.erase(sid);
  }
};

RpcServer::RpcServer(cs::FunctionStore store, ServerOptions options)
    : impl_(std::make_unique<Impl>(std::move(store), options)) {}

RpcServer::~RpcServer() { stop(); }

bool RpcServer::listen(const std::string& host, int port) {
  return impl_->http.listen(host, port);
}

int RpcServer::bind_any(const std::string& host) {
  return impl_->http.bind_to_any_port(host);
}

bool RpcServer::serve_bound() { return impl_->http.listen_after_bind(); }

bool RpcServer::wait_ready(int timeout_ms) const {
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  while (!impl_->http.is_running()) {
    if (std::chrono::steady_clock::now() > deadline) return false;
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  return true;
}

void RpcServer::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

std::size_t RpcServer::open_sessions() const {
  std::lock_guard<std::mutex> lock(impl_->mu);
  return impl_->sessions.size();
}

}  // namespace locrpc::net
