#pragma once

#include <stdexcept>
#include <string>

namespace flexplan {

inline constexpr const char* kVersion = "0.1.0";

/// Faraday's constant in C/mol.
inline constexpr double kFaraday = 96485.33212;

enum class ErrorCode {
  Config = 1,
  Ingest,
  Domain,
  Region,
  Dimension,
  Reformulation,
  Solver,
  Io,
};

/// Common error type; `code()` maps onto the CLI exit-code table.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline Error config_error(const std::string& what) { return {ErrorCode::Config, what}; }
inline Error ingest_error(const std::string& what) { return {ErrorCode::Ingest, what}; }
inline Error domain_error(const std::string& what) { return {ErrorCode::Domain, what}; }
inline Error region_error(const std::string& what) { return {ErrorCode::Region, what}; }
inline Error dimension_error(const std::string& what) { return {ErrorCode::Dimension, what}; }
inline Error reformulation_error(const std::string& what) {
  return {ErrorCode::Reformulation, what};
}
inline Error solver_error(const std::string& what) { return {ErrorCode::Solver, what}; }
inline Error io_error(const std::string& what) { return {ErrorCode::Io, what}; }

}  // namespace flexplan
