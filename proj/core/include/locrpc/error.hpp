#pragma once

#include <stdexcept>
#include <string>

#include "locrpc/span.hpp"

namespace locrpc {

enum class ErrorKind {
  Syntax,
  TypeMismatch,
  LocationMismatch,
  UnboundVariable,
  OccursCheck,
  ShapeMismatch,
  GenerationExhausted,
  StuckApplication,
  FreeVariable,
  FuelExhausted,
  IllformedAnnotation,
  Stuck,
  UnknownFunction,
  WrongLocationStore,
  ArityMismatch,
  MalformedStore,
  DecodeError,
  Transport,
  ServerError,
  UnknownSession,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, SourceSpan span = {}, int status = 0)
      : std::runtime_error(std::move(message)), kind_(kind), span_(span), status_(status) {}

  ErrorKind kind() const { return kind_; }
  const SourceSpan& span() const { return span_; }

  // HTTP status for ServerError; 0 otherwise.
  int status() const { return status_; }

  // One-line form: error[KIND] file:line:col message
  std::string render(const std::string& file = "") const;

 private:
  ErrorKind kind_;
  SourceSpan span_;
  int status_;
};

}  // namespace locrpc
