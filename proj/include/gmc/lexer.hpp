#pragma once

// Tokenizer for .gmc model text. Longest-match on operators; `[]` is a
// single choice token only when the brackets are adjacent; digit runs
// followed by `..` lex as an integer plus the range operator.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "gmc/common.hpp"

namespace gmc {

enum class Tok {
  End, Ident, IntLit, DecLit,
  KwVar, KwIf, KwElse, KwStop, KwSkip, KwReaches, KwWith, KwMax, KwMin,
  KwDeadlockFree, KwTrue, KwFalse, HashDefine, HashAssert,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  ChoiceExt,   // []
  ChoiceInt,   // <>
  Parallel,    // ||  (boolean-or in condition context)
  Models,      // |=
  Arrow,       // ->
  Semi, Comma, Dot, DotDot, Colon, At,
  Assign, PlusAssign, MinusAssign, StarAssign,
  Eq, Ne, Lt, Le, Gt, Ge,
  AndAnd, Not, Plus, Minus, Star, Slash, Percent, Caret,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Int int_val = 0;
  Rat dec_val;
  SourcePos pos;
};

inline const char* tok_name(Tok t) {
  switch (t) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::IntLit: return "integer";
    case Tok::DecLit: return "decimal";
    case Tok::KwVar: return "'var'";
    case Tok::KwIf: return "'if'";
    case Tok::KwElse: return "'else'";
    case Tok::KwStop: return "'Stop'";
    case Tok::KwSkip: return "'Skip'";
    case Tok::KwReaches: return "'reaches'";
    case Tok::KwWith: return "'with'";
    case Tok::KwMax: return "'max'";
    case Tok::KwMin: return "'min'";
    case Tok::KwDeadlockFree: return "'deadlockfree'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::HashDefine: return "'#define'";
    case Tok::HashAssert: return "'#assert'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::ChoiceExt: return "'[]'";
    case Tok::ChoiceInt: return "'<>'";
    case Tok::Parallel: return "'||'";
    case Tok::Models: return "'|='";
    case Tok::Arrow: return "'->'";
    case Tok::Semi: return "';'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::DotDot: return "'..'";
    case Tok::Colon: return "':'";
    case Tok::At: return "'@'";
    case Tok::Assign: return "'='";
    case Tok::PlusAssign: return "'+='";
    case Tok::MinusAssign: return "'-='";
    case Tok::StarAssign: return "'*='";
    case Tok::Eq: return "'=='";
    case Tok::Ne: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::AndAnd: return "'&&'";
    case Tok::Not: return "'!'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Percent: return "'%'";
    case Tok::Caret: return "'^'";
  }
  return "?";
}

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto pos = [&]() { return SourcePos{line, col}; };
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (i < src.size() && src[i] == '\n') { ++line; col = 1; } else { ++col; }
      ++i;
    }
  };
  auto peek = [&](std::size_t off = 0) -> char {
    return i + off < src.size() ? src[i + off] : '\0';
  };
  auto push = [&](Tok k, SourcePos p, std::string text = "") {
    Token t; t.kind = k; t.pos = p; t.text = std::move(text);
    out.push_back(std::move(t));
  };

  while (i < src.size()) {
    char c = peek();
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') { advance(1); continue; }
    if (c == '/' && peek(1) == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    SourcePos p = pos();
    if (std::isdigit((unsigned char)c)) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit((unsigned char)src[j])) ++j;
      bool decimal = j < src.size() && src[j] == '.' &&
                     j + 1 < src.size() && std::isdigit((unsigned char)src[j + 1]);
      if (decimal) {
        std::size_t k = j + 1;
        while (k < src.size() && std::isdigit((unsigned char)src[k])) ++k;
        std::string whole(src.substr(i, j - i));
        std::string frac(src.substr(j + 1, k - j - 1));
        if (frac.size() > 18 || whole.size() > 18)
          throw ParseError(p, "numeric literal too large");
        Int den = 1;
        for (std::size_t q = 0; q < frac.size(); ++q) den *= 10;
        Token t; t.kind = Tok::DecLit; t.pos = p;
        t.text = whole + "." + frac;
        t.dec_val = Rat(std::stoll(whole) * den + (frac.empty() ? 0 : std::stoll(frac)), den);
        out.push_back(std::move(t));
        advance(k - i);
      } else {
        std::string digits(src.substr(i, j - i));
        if (digits.size() > 18) throw ParseError(p, "numeric literal too large");
        Token t; t.kind = Tok::IntLit; t.pos = p; t.text = digits;
        t.int_val = std::stoll(digits);
        out.push_back(std::move(t));
        advance(j - i);
      }
      continue;
    }
    if (std::isalpha((unsigned char)c) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum((unsigned char)src[j]) || src[j] == '_'))
        ++j;
      std::string w(src.substr(i, j - i));
      Tok k = Tok::Ident;
      if (w == "var") k = Tok::KwVar;
      else if (w == "if") k = Tok::KwIf;
      else if (w == "else") k = Tok::KwElse;
      else if (w == "Stop") k = Tok::KwStop;
      else if (w == "Skip") k = Tok::KwSkip;
      else if (w == "reaches") k = Tok::KwReaches;
      else if (w == "with") k = Tok::KwWith;
      else if (w == "max") k = Tok::KwMax;
      else if (w == "min") k = Tok::KwMin;
      else if (w == "deadlockfree") k = Tok::KwDeadlockFree;
      else if (w == "true") k = Tok::KwTrue;
      else if (w == "false") k = Tok::KwFalse;
      push(k, p, w);
      advance(j - i);
      continue;
    }
    if (c == '#') {
      std::size_t j = i + 1;
      while (j < src.size() &&
             (std::isalnum((unsigned char)src[j]) || src[j] == '_'))
        ++j;
      std::string w(src.substr(i + 1, j - i - 1));
      if (w == "define") push(Tok::HashDefine, p);
      else if (w == "assert") push(Tok::HashAssert, p);
      else throw ParseError(p, "unknown directive '#" + w + "'");
      advance(j - i);
      continue;
    }
    auto two = [&](char a, char b) { return c == a && peek(1) == b; };
    if (two('[', ']')) { push(Tok::ChoiceExt, p); advance(2); continue; }
    if (two('<', '>')) { push(Tok::ChoiceInt, p); advance(2); continue; }
    if (two('|', '|')) { push(Tok::Parallel, p); advance(2); continue; }
    if (two('|', '=')) { push(Tok::Models, p); advance(2); continue; }
    if (two('-', '>')) { push(Tok::Arrow, p); advance(2); continue; }
    if (two('.', '.')) { push(Tok::DotDot, p); advance(2); continue; }
    if (two('=', '=')) { push(Tok::Eq, p); advance(2); continue; }
    if (two('!', '=')) { push(Tok::Ne, p); advance(2); continue; }
    if (two('<', '=')) { push(Tok::Le, p); advance(2); continue; }
    if (two('>', '=')) { push(Tok::Ge, p); advance(2); continue; }
    if (two('&', '&')) { push(Tok::AndAnd, p); advance(2); continue; }
    if (two('+', '=')) { push(Tok::PlusAssign, p); advance(2); continue; }
    if (two('-', '=')) { push(Tok::MinusAssign, p); advance(2); continue; }
    if (two('*', '=')) { push(Tok::StarAssign, p); advance(2); continue; }
    switch (c) {
      case '(': push(Tok::LParen, p); break;
      case ')': push(Tok::RParen, p); break;
      case '{': push(Tok::LBrace, p); break;
      case '}': push(Tok::RBrace, p); break;
      case '[': push(Tok::LBracket, p); break;
      case ']': push(Tok::RBracket, p); break;
      case ';': push(Tok::Semi, p); break;
      case ',': push(Tok::Comma, p); break;
      case '.': push(Tok::Dot, p); break;
      case ':': push(Tok::Colon, p); break;
      case '@': push(Tok::At, p); break;
      case '=': push(Tok::Assign, p); break;
      case '<': push(Tok::Lt, p); break;
      case '>': push(Tok::Gt, p); break;
      case '!': push(Tok::Not, p); break;
      case '+': push(Tok::Plus, p); break;
      case '-': push(Tok::Minus, p); break;
      case '*': push(Tok::Star, p); break;
      case '/': push(Tok::Slash, p); break;
      case '%': push(Tok::Percent, p); break;
      case '^': push(Tok::Caret, p); break;
      default:
        throw ParseError(p, std::string("unexpected character '") + c + "'");
    }
    advance(1);
  }
  Token t; t.kind = Tok::End; t.pos = pos();
  out.push_back(std::move(t));
  return out;
}

}  // namespace gmc
