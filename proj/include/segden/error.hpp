#pragma once

#include <stdexcept>
#include <string>

namespace segden {

enum class ErrorCode {
  NonManifoldEdge,
  DegenerateFace,
  ZeroAreaFace,
  BoundaryEdge,
  ParseError,
  NonTriangleFace,
  IoError,
  LabelLengthMismatch,
  EmptyMesh,
  DegenerateFlap,
  SolverDiverged,
  ConnectivityMismatch,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonManifoldEdge: return "NonManifoldEdge";
    case ErrorCode::DegenerateFace: return "DegenerateFace";
    case ErrorCode::ZeroAreaFace: return "ZeroAreaFace";
    case ErrorCode::BoundaryEdge: return "BoundaryEdge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonTriangleFace: return "NonTriangleFace";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::LabelLengthMismatch: return "LabelLengthMismatch";
    case ErrorCode::EmptyMesh: return "EmptyMesh";
    case ErrorCode::DegenerateFlap: return "DegenerateFlap";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
    case ErrorCode::ConnectivityMismatch: return "ConnectivityMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace segden
