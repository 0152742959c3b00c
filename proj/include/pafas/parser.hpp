#pragma once

#include <string_view>

#include "pafas/term.hpp"

namespace pafas {

// Parses a full program: `Name = Term;`* `main Term`. Throws SyntaxError
// with 1-based line/col. The result is well-formedness-checked.
ProgramEnv parse_program(TermTable& tt, std::string_view src,
                         std::string_view filename = "<input>");

// Parses a single closed term (test/tool convenience): same grammar as a
// definition body, no definitions, no main keyword.
TermId parse_term(TermTable& tt, std::string_view src);

}  // namespace pafas
