#include "locrpc/error.hpp"

#include <sstream>

namespace locrpc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::LocationMismatch: return "LocationMismatch";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::OccursCheck: return "OccursCheck";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::GenerationExhausted: return "GenerationExhausted";
    case ErrorKind::StuckApplication: return "StuckApplication";
    case ErrorKind::FreeVariable: return "FreeVariable";
    case ErrorKind::FuelExhausted: return "FuelExhausted";
    case ErrorKind::IllformedAnnotation: return "IllformedAnnotation";
    case ErrorKind::Stuck: return "Stuck";
    case ErrorKind::UnknownFunction: return "UnknownFunction";
    case ErrorKind::WrongLocationStore: return "WrongLocationStore";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::MalformedStore: return "MalformedStore";
    case ErrorKind::DecodeError: return "DecodeError";
    case ErrorKind::Transport: return "Transport";
    case ErrorKind::ServerError: return "ServerError";
    case ErrorKind::UnknownSession: return "UnknownSession";
  }
  return "Error";
}

std::string Error::render(const std::string& file) const {
  std::ostringstream out;
  out << "error[" << to_string(kind_) << "] ";
  out << (file.empty() ? "<input>" : file) << ":" << span_.line << ":" << span_.column;
  out << " " << what();
  return out.str();
}

}  // namespace locrpc
