#include "pafas/parser.hpp"

#include <cctype>
#include <string>
#include <vector>

#include "pafas/errors.hpp"

namespace pafas {

namespace {

enum class Tok {
  End, Ident, UrgentIdent, Zero, Dot, Plus, LParen, RParen,
  ParAll,    // ||
  ParOpen,   // |[
  ParClose,  // ]|
  LBracket, RBracket, Arrow, Comma, Slash, LBrace, RBrace,
  Equals, Semi, KwRec, KwMain, KwTau,
};

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

struct Lexer {
  std::string_view src;
  size_t pos = 0;
  int line = 1, col = 1;

  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(line, col, msg); }

  void advance(size_t n) {
    for (size_t i = 0; i < n; ++i) {
      if (src[pos] == '\n') { ++line; col = 1; } else { ++col; }
      ++pos;
    }
  }

  void skip_ws() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == '#') {
        while (pos < src.size() && src[pos] != '\n') advance(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else {
        break;
      }
    }
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  Token next() {
    skip_ws();
    Token t{Tok::End, "", line, col};
    if (pos >= src.size()) return t;
    char c = src[pos];
    auto one = [&](Tok k) { t.kind = k; t.text = src.substr(pos, 1); advance(1); return t; };
    auto two = [&](Tok k, const char* s) { t.kind = k; t.text = s; advance(2); return t; };
    switch (c) {
      case '0': return one(Tok::Zero);
      case '.': return one(Tok::Dot);
      case '+': return one(Tok::Plus);
      case '(': return one(Tok::LParen);
      case ')': return one(Tok::RParen);
      case ',': return one(Tok::Comma);
      case '/': return one(Tok::Slash);
      case '{': return one(Tok::LBrace);
      case '}': return one(Tok::RBrace);
      case '=': return one(Tok::Equals);
      case ';': return one(Tok::Semi);
      case '[': return one(Tok::LBracket);
      case '|':
        if (pos + 1 < src.size() && src[pos + 1] == '|') return two(Tok::ParAll, "||");
        if (pos + 1 < src.size() && src[pos + 1] == '[') return two(Tok::ParOpen, "|[");
        fail("expected '||' or '|['");
      case ']':
        if (pos + 1 < src.size() && src[pos + 1] == '|') return two(Tok::ParClose, "]|");
        return one(Tok::RBracket);
      case '-':
        if (pos + 1 < src.size() && src[pos + 1] == '>') return two(Tok::Arrow, "->");
        fail("expected '->'");
      case '_': {
        if (pos + 1 >= src.size() || !ident_start(src[pos + 1]))
          fail("'_' must be followed by an action name");
        size_t start = pos + 1, end = start;
        while (end < src.size() && ident_char(src[end])) ++end;
        t.kind = Tok::UrgentIdent;
        t.text = std::string(src.substr(start, end - start));
        advance(end - pos);
        return t;
      }
      default:
        if (ident_start(c)) {
          size_t end = pos;
          while (end < src.size() && ident_char(src[end])) ++end;
          t.text = std::string(src.substr(pos, end - pos));
          advance(end - pos);
          if (t.text == "rec") t.kind = Tok::KwRec;
          else if (t.text == "main") t.kind = Tok::KwMain;
          else if (t.text == "tau") t.kind = Tok::KwTau;
          else t.kind = Tok::Ident;
          return t;
        }
        fail(std::string("unexpected character '") + c + "'");
    }
  }
};

struct Parser {
  TermTable& tt;
  Lexer lex;
  Token cur;
  std::vector<std::string> binders;

  explicit Parser(TermTable& tt_, std::string_view src) : tt(tt_), lex{src} { cur = lex.next(); }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(cur.line, cur.col, msg + " (got '" +
                      (cur.kind == Tok::End ? "end of input" : cur.text) + "')");
  }

  void bump() { cur = lex.next(); }

  void expect(Tok k, const char* what) {
    if (cur.kind != k) fail(std::string("expected ") + what);
    bump();
  }

  ActionId action_name() {
    if (cur.kind == Tok::KwTau) { bump(); return kTau; }
    if (cur.kind != Tok::Ident) fail("expected action name");
    ActionId a = actions().intern(cur.text);
    bump();
    return a;
  }

  ActionSet action_list(Tok closer) {
    ActionSet s;
    if (cur.kind != closer) {
      aset_insert(s, action_name());
      while (cur.kind == Tok::Comma) {
        bump();
        aset_insert(s, action_name());
      }
    }
    return s;
  }

  // term := parallel; parallel := choice { ('||' | '|[' list ']|') choice }
  TermId term() {
    TermId l = choice_level();
    while (cur.kind == Tok::ParAll || cur.kind == Tok::ParOpen) {
      SyncSet s;
      if (cur.kind == Tok::ParAll) {
        s.all_but_omega = true;
        bump();
      } else {
        bump();
        s.acts = action_list(Tok::ParClose);
        expect(Tok::ParClose, "']|'");
      }
      TermId r = choice_level();
      l = tt.par(l, tt.intern_sync(std::move(s)), r);
    }
    return l;
  }

  TermId choice_level() {
    TermId l = postfix_level();
    while (cur.kind == Tok::Plus) {
      bump();
      l = tt.choice(l, postfix_level());
    }
    return l;
  }

  TermId postfix_level() {
    TermId t = prefix_level();
    for (;;) {
      if (cur.kind == Tok::LBracket) {
        bump();
        std::vector<std::pair<ActionId, ActionId>> entries;
        if (cur.kind != Tok::RBracket) {
          for (;;) {
            if (cur.kind != Tok::Ident) fail("expected source action");
            ActionId src = actions().intern(cur.text);
            bump();
            expect(Tok::Arrow, "'->'");
            ActionId dst = action_name();
            entries.emplace_back(src, dst);
            if (cur.kind != Tok::Comma) break;
            bump();
          }
        }
        expect(Tok::RBracket, "']'");
        t = tt.rel(t, tt.intern_relabel(make_relabel(std::move(entries))));
      } else if (cur.kind == Tok::Slash) {
        bump();
        expect(Tok::LBrace, "'{'");
        ActionSet hidden = action_list(Tok::RBrace);
        expect(Tok::RBrace, "'}'");
        t = tt.rel(t, tt.intern_relabel(make_hide(hidden)));
      } else {
        return t;
      }
    }
  }

  // prefix binds tightest: a chain of action prefixes over an atom.
  TermId prefix_level() {
    if (cur.kind == Tok::UrgentIdent || cur.kind == Tok::KwTau ||
        (cur.kind == Tok::Ident && peek_is_dot())) {
      bool urgent = cur.kind == Tok::UrgentIdent;
      ActionId a;
      if (cur.kind == Tok::KwTau) {
        a = kTau;
        bump();
      } else {
        a = actions().intern(cur.text);
        bump();
      }
      expect(Tok::Dot, "'.'");
      return tt.prefix(urgent, a, prefix_level());
    }
    return atom();
  }

  bool peek_is_dot() {
    Lexer saved = lex;
    Token t = lex.next();
    lex = saved;
    return t.kind == Tok::Dot;
  }

  TermId atom() {
    switch (cur.kind) {
      case Tok::Zero:
        bump();
        return tt.nil();
      case Tok::LParen: {
        bump();
        TermId t = term();
        expect(Tok::RParen, "')'");
        return t;
      }
      case Tok::KwRec: {
        bump();
        if (cur.kind != Tok::Ident) fail("expected binder name after 'rec'");
        std::string name = cur.text;
        bump();
        expect(Tok::Dot, "'.'");
        binders.push_back(name);
        TermId body = prefix_level();
        binders.pop_back();
        return tt.rec(body, tt.intern_name(name));
      }
      case Tok::Ident: {
        // Innermost matching rec binder wins; otherwise a definition reference.
        for (size_t i = binders.size(); i-- > 0;) {
          if (binders[i] == cur.text) {
            bump();
            return tt.var(static_cast<int32_t>(binders.size() - 1 - i));
          }
        }
        TermId t = tt.ref(tt.intern_name(cur.text));
        bump();
        return t;
      }
      default:
        fail("expected a term");
    }
  }
};

}  // namespace

ProgramEnv parse_program(TermTable& tt, std::string_view src, std::string_view) {
  Parser p(tt, src);
  ProgramEnv env;
  while (p.cur.kind == Tok::Ident || p.cur.kind == Tok::UrgentIdent ||
         p.cur.kind == Tok::KwTau || p.cur.kind == Tok::Zero ||
         p.cur.kind == Tok::LParen || p.cur.kind == Tok::KwRec) {
    // A definition only starts with IDENT '='; anything else must be main-less.
    if (p.cur.kind != Tok::Ident) p.fail("expected a definition or 'main'");
    Lexer saved = p.lex;
    Token name_tok = p.cur;
    p.bump();
    if (p.cur.kind != Tok::Equals) {
      p.fail("expected '=' after definition name (or 'main <term>')");
    }
    p.bump();
    TermId body = p.term();
    p.expect(Tok::Semi, "';'");
    (void)saved;
    NameId name = tt.intern_name(name_tok.text);
    if (env.by_name.count(name))
      throw SyntaxError(name_tok.line, name_tok.col,
                        "duplicate definition of " + name_tok.text);
    env.defs.emplace_back(name, body);
    env.by_name.emplace(name, body);
    if (p.cur.kind == Tok::KwMain) break;
  }
  if (p.cur.kind != Tok::KwMain) p.fail("expected 'main'");
  p.bump();
  env.main = p.term();
  if (p.cur.kind == Tok::Semi) p.bump();
  if (p.cur.kind != Tok::End) p.fail("expected end of input after main term");
  check_well_formed(tt, env);
  return env;
}

TermId parse_term(TermTable& tt, std::string_view src) {
  Parser p(tt, src);
  TermId t = p.term();
  if (p.cur.kind != Tok::End) p.fail("expected end of input");
  ProgramEnv env;
  env.main = t;
  check_well_formed(tt, env);
  return t;
}

}  // namespace pafas
