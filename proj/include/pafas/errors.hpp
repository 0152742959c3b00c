#pragma once

#include <stdexcept>
#include <string>

namespace pafas {

// Exit codes shared between library errors and the CLI:
//   0 ok, 1 I/O, 2 syntax/well-formedness, 3 catastrophic cycle found,
//   4 state cap exceeded, 5 internal invariant violation.
enum ExitCode {
  kExitOk = 0,
  kExitIo = 1,
  kExitInput = 2,
  kExitCatastrophic = 3,
  kExitCap = 4,
  kExitInternal = 5,
};

struct Error : std::runtime_error {
  int exit_code;
  Error(int code, const std::string& msg) : std::runtime_error(msg), exit_code(code) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(kExitIo, msg) {}
};

struct SyntaxError : Error {
  int line, col;
  SyntaxError(int line_, int col_, const std::string& msg)
      : Error(kExitInput, "syntax error at " + std::to_string(line_) + ":" +
                              std::to_string(col_) + ": " + msg),
        line(line_), col(col_) {}
};

struct WellFormedError : Error {
  explicit WellFormedError(const std::string& msg) : Error(kExitInput, msg) {}
};

struct UnboundVariable : WellFormedError {
  explicit UnboundVariable(const std::string& name)
      : WellFormedError("unbound name: " + name) {}
};

struct UnguardedRecursion : WellFormedError {
  explicit UnguardedRecursion(const std::string& name)
      : WellFormedError("unguarded recursion through " + name) {}
};

struct StateCapExceeded : Error {
  explicit StateCapExceeded(size_t cap)
      : Error(kExitCap, "state cap exceeded (" + std::to_string(cap) + " nodes)") {}
};

struct InternalError : Error {
  explicit InternalError(const std::string& msg)
      : Error(kExitInternal, "internal error: " + msg) {}
};

// An analysis was handed a graph that violates its entry conditions (e.g. a
// positive-time cycle inside what should be a catastrophic-free layer).
struct PreconditionViolated : InternalError {
  explicit PreconditionViolated(const std::string& msg) : InternalError(msg) {}
};

struct NotAResponseProcess : Error {
  explicit NotAResponseProcess(const std::string& msg) : Error(kExitInput, msg) {}
};

}  // namespace pafas
