#pragma once

#include <optional>
#include <string>

#include "pafas/term.hpp"

namespace pafas {

// Three bounded-buffer implementations over the interface {in, out}, each of
// total capacity n+2, as named defining equations plus a main term.

// One process with a state per fill level 0..n+2.
ProgramEnv gen_fifo(TermTable& tt, int n);

// n+2 one-place cells chained by hidden handover actions d0..d{n+1}; input
// enters at the last cell, output leaves cell 0.
ProgramEnv gen_pipe(TermTable& tt, int n);

// n interleaved one-place memory cells plus a sequential controller that
// round-robins reads and writes; cell access actions w0..r{n-1} are
// synchronized and hidden.
ProgramEnv gen_buff(TermTable& tt, int n);

// n request threads _in._out._omega.0 composed with sync set {omega}: they
// interleave, but all must finish before omega can report completion.
TermId gen_user(TermTable& tt, int n);

// "fifo:N" | "pipe:N" | "buff:N" | "user:N" -> generated program; nullopt if
// the string is not of that shape. Throws WellFormedError for N < 1.
std::optional<ProgramEnv> builtin_program(TermTable& tt, const std::string& spec);

}  // namespace pafas
