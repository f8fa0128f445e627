#include "aptc/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>

namespace aptc {

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok {
  Ident,
  Number,
  Semi,
  Comma,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Eq,        // =
  Le,        // <=
  Assign,    // :=
  Colon,     // :
  Hash,      // #
  At,        // @
  Plus,      // +
  Dot,       // .
  Bar,       // |
  Bar2,      // ||
  Bar3,      // |||
  Amp,       // &
  Bang,      // !
  Arrow,     // ->
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1;
  int col = 1;
  std::vector<Token> tokens;

  explicit Lexer(const std::string& s) : src(s) {}

  [[noreturn]] void fail(const std::string& expected) {
    std::string got = pos < src.size() ? std::string(1, src[pos]) : "<eof>";
    throw SyntaxError(line, col, expected, got);
  }

  void push(Tok k, std::string text, int l, int c) {
    tokens.push_back({k, std::move(text), l, c});
  }

  void run() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == '\n') {
        ++pos;
        ++line;
        col = 1;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
        ++col;
        continue;
      }
      if (c == '/' && pos + 1 < src.size() && src[pos + 1] == '/') {
        while (pos < src.size() && src[pos] != '\n') ++pos;
        continue;
      }
      int l = line, co = col;
      auto single = [&](Tok k) {
        push(k, std::string(1, src[pos]), l, co);
        ++pos;
        ++col;
      };
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t start = pos;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) ||
                src[pos] == '_'))
          ++pos, ++col;
        push(Tok::Ident, src.substr(start, pos - start), l, co);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        size_t start = pos;
        while (pos < src.size() &&
               std::isdigit(static_cast<unsigned char>(src[pos])))
          ++pos, ++col;
        push(Tok::Number, src.substr(start, pos - start), l, co);
        continue;
      }
      switch (c) {
        case ';':
          single(Tok::Semi);
          break;
        case ',':
          single(Tok::Comma);
          break;
        case '(':
          single(Tok::LParen);
          break;
        case ')':
          single(Tok::RParen);
          break;
        case '{':
          single(Tok::LBrace);
          break;
        case '}':
          single(Tok::RBrace);
          break;
        case '[':
          single(Tok::LBracket);
          break;
        case ']':
          single(Tok::RBracket);
          break;
        case '=':
          single(Tok::Eq);
          break;
        case '#':
          single(Tok::Hash);
          break;
        case '@':
          single(Tok::At);
          break;
        case '+':
          single(Tok::Plus);
          break;
        case '.':
          single(Tok::Dot);
          break;
        case '&':
          single(Tok::Amp);
          break;
        case '!':
          single(Tok::Bang);
          break;
        case '<':
          if (pos + 1 < src.size() && src[pos + 1] == '=') {
            push(Tok::Le, "<=", l, co);
            pos += 2;
            col += 2;
          } else {
            fail("'<='");
          }
          break;
        case ':':
          if (pos + 1 < src.size() && src[pos + 1] == '=') {
            push(Tok::Assign, ":=", l, co);
            pos += 2;
            col += 2;
          } else {
            single(Tok::Colon);
          }
          break;
        case '-':
          if (pos + 1 < src.size() && src[pos + 1] == '>') {
            push(Tok::Arrow, "->", l, co);
            pos += 2;
            col += 2;
          } else {
            fail("'->'");
          }
          break;
        case '|':
          if (pos + 2 < src.size() && src[pos + 1] == '|' &&
              src[pos + 2] == '|') {
            push(Tok::Bar3, "|||", l, co);
            pos += 3;
            col += 3;
          } else if (pos + 1 < src.size() && src[pos + 1] == '|') {
            push(Tok::Bar2, "||", l, co);
            pos += 2;
            col += 2;
          } else {
            single(Tok::Bar);
          }
          break;
        default:
          fail("a token");
      }
    }
    push(Tok::End, "<eof>", line, col);
  }
};

// ---------------------------------------------------------------------------
// Raw declarations (pre-expansion)
// ---------------------------------------------------------------------------

struct RawProc {
  std::string name;
  std::vector<std::pair<std::string, std::string>> params;  // var : domain
  TermPtr body;  // proc references appear as RecVar("Name(raw,args)")
};

struct RawCommRule {
  ActionLabel a, b, result;  // args may be pattern variables
  int line;
};

std::string mangle(const std::string& name,
                   const std::vector<std::string>& args) {
  if (args.empty()) return name;
  std::string out = name;
  for (const auto& a : args) out += "_" + a;
  return out;
}

// Splits "Name(a,b)" raw reference names produced while parsing proc bodies.
bool split_ref(const std::string& raw, std::string& name,
               std::vector<std::string>& args) {
  auto lp = raw.find('(');
  if (lp == std::string::npos) {
    name = raw;
    args.clear();
    return true;
  }
  if (raw.back() != ')') return false;
  name = raw.substr(0, lp);
  args.clear();
  std::string cur;
  for (size_t i = lp + 1; i + 1 < raw.size(); ++i) {
    if (raw[i] == ',') {
      args.push_back(cur);
      cur.clear();
    } else {
      cur += raw[i];
    }
  }
  if (!cur.empty()) args.push_back(cur);
  return true;
}

// Rewrites data variables inside raw RecVar reference names.
TermPtr subst_refs(const TermPtr& t, const std::string& var,
                   const std::string& value) {
  if (!t) return t;
  if (t->kind == TermKind::RecVar) {
    std::string name;
    std::vector<std::string> args;
    if (!split_ref(t->var, name, args)) return t;
    bool changed = false;
    for (auto& a : args)
      if (a == var) {
        a = value;
        changed = true;
      }
    if (!changed) return t;
    std::string rebuilt = name;
    if (!args.empty()) {
      rebuilt += "(";
      for (size_t i = 0; i < args.size(); ++i) {
        if (i) rebuilt += ",";
        rebuilt += args[i];
      }
      rebuilt += ")";
    }
    return t_recvar(rebuilt);
  }
  switch (t->kind) {
    case TermKind::Seq:
      return t_seq(subst_refs(t->l, var, value), subst_refs(t->r, var, value));
    case TermKind::Alt:
      return t_alt(subst_refs(t->l, var, value), subst_refs(t->r, var, value));
    case TermKind::Par:
      return t_par(subst_refs(t->l, var, value), subst_refs(t->r, var, value));
    case TermKind::Comm:
      return t_comm(subst_refs(t->l, var, value),
                    subst_refs(t->r, var, value));
    case TermKind::Merge:
      return t_merge(subst_refs(t->l, var, value),
                     subst_refs(t->r, var, value));
    case TermKind::Theta:
      return t_theta(subst_refs(t->l, var, value));
    case TermKind::Unless:
      return t_unless(subst_refs(t->l, var, value),
                      subst_refs(t->r, var, value));
    case TermKind::Encap:
      return t_encap(t->names, subst_refs(t->l, var, value));
    case TermKind::Hide:
      return t_hide(t->names, subst_refs(t->l, var, value));
    case TermKind::New:
      return t_new(subst_refs(t->l, var, value));
    default:
      return t;
  }
}

TermPtr subst_all(const TermPtr& t, const std::string& var,
                  const std::string& value) {
  return subst_refs(substitute_data(t, var, value), var, value);
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
  std::vector<Token> toks;
  size_t at = 0;
  Model m;
  std::vector<RawProc> raw_procs;
  std::vector<RawCommRule> raw_comms;
  TermPtr raw_system, raw_spec;
  std::vector<std::string> data_scope;  // sum binders / proc params in scope

  const Token& peek(int k = 0) const { return toks[std::min(at + k, toks.size() - 1)]; }
  const Token& cur() const { return toks[at]; }

  [[noreturn]] void fail(const std::string& expected) {
    throw SyntaxError(cur().line, cur().col, expected, cur().text);
  }

  bool is_kw(const std::string& kw) const {
    return cur().kind == Tok::Ident && cur().text == kw;
  }

  Token expect(Tok k, const std::string& what) {
    if (cur().kind != k) fail(what);
    return toks[at++];
  }

  void expect_kw(const std::string& kw) {
    if (!is_kw(kw)) fail("'" + kw + "'");
    ++at;
  }

  bool accept(Tok k) {
    if (cur().kind == k) {
      ++at;
      return true;
    }
    return false;
  }

  bool in_scope(const std::string& v) const {
    return std::find(data_scope.begin(), data_scope.end(), v) !=
           data_scope.end();
  }

  // -------------------------------------------------------------------------

  void parse() {
    expect_kw("model");
    m.name = expect(Tok::Ident, "model name").text;
    expect(Tok::Semi, "';'");
    while (cur().kind != Tok::End) parse_decl();
    finish();
  }

  void parse_decl() {
    if (is_kw("domain"))
      parse_domain();
    else if (is_kw("act"))
      parse_act();
    else if (is_kw("comm"))
      parse_comm();
    else if (is_kw("conflict"))
      parse_conflict();
    else if (is_kw("order"))
      parse_order();
    else if (is_kw("mailbox"))
      parse_mailbox();
    else if (is_kw("var"))
      parse_var();
    else if (is_kw("effect"))
      parse_effect();
    else if (is_kw("proc"))
      parse_proc();
    else if (is_kw("system"))
      parse_system();
    else if (is_kw("spec"))
      parse_spec();
    else
      fail("a declaration");
  }

  std::string value_token() {
    if (cur().kind == Tok::Ident || cur().kind == Tok::Number)
      return toks[at++].text;
    fail("a value");
  }

  void parse_domain() {
    ++at;
    std::string name = expect(Tok::Ident, "domain name").text;
    expect(Tok::Eq, "'='");
    expect(Tok::LBrace, "'{'");
    std::vector<std::string> vals;
    vals.push_back(value_token());
    while (accept(Tok::Comma)) vals.push_back(value_token());
    expect(Tok::RBrace, "'}'");
    expect(Tok::Semi, "';'");
    if (m.domains.count(name)) throw ModelError("duplicate domain " + name);
    m.domain_order.push_back(name);
    m.domains[name] = std::move(vals);
  }

  void parse_act() {
    ++at;
    do {
      ActionSignature sig;
      sig.name = expect(Tok::Ident, "action name").text;
      if (sig.name == "tau" || sig.name == "delta" || sig.name == "eps")
        throw ModelError("'" + sig.name + "' is reserved");
      if (accept(Tok::LParen)) {
        sig.domains.push_back(expect(Tok::Ident, "domain name").text);
        while (accept(Tok::Comma))
          sig.domains.push_back(expect(Tok::Ident, "domain name").text);
        expect(Tok::RParen, "')'");
      }
      if (is_kw("sends")) {
        ++at;
        sig.sends_mailbox = expect(Tok::Ident, "mailbox name").text;
      } else if (is_kw("receives")) {
        ++at;
        sig.receives_mailbox = expect(Tok::Ident, "mailbox name").text;
      }
      if (m.actions.count(sig.name))
        throw ModelError("duplicate action " + sig.name);
      m.action_order.push_back(sig);
      m.actions[sig.name] = sig;
    } while (accept(Tok::Comma));
    expect(Tok::Semi, "';'");
  }

  ActionLabel parse_action_pattern() {
    ActionLabel a;
    a.name = expect(Tok::Ident, "action name").text;
    a.kind = ActionKind::Visible;
    if (accept(Tok::LParen)) {
      a.args.push_back(value_token());
      while (accept(Tok::Comma)) a.args.push_back(value_token());
      expect(Tok::RParen, "')'");
    }
    return a;
  }

  void parse_comm() {
    int line = cur().line;
    ++at;
    RawCommRule rule;
    rule.line = line;
    rule.a = parse_action_pattern();
    expect(Tok::Bar, "'|'");
    rule.b = parse_action_pattern();
    expect(Tok::Eq, "'='");
    rule.result = parse_action_pattern();
    expect(Tok::Semi, "';'");
    raw_comms.push_back(std::move(rule));
  }

  void parse_conflict() {
    ++at;
    ActionLabel a = parse_action_pattern();
    expect(Tok::Hash, "'#'");
    ActionLabel b = parse_action_pattern();
    expect(Tok::Semi, "';'");
    m.conflicts.insert({a, b});
    m.conflicts.insert({b, a});
  }

  void parse_order() {
    ++at;
    ActionLabel a = parse_action_pattern();
    expect(Tok::Le, "'<='");
    ActionLabel b = parse_action_pattern();
    expect(Tok::Semi, "';'");
    m.causal_le.insert({a, b});
  }

  void parse_mailbox() {
    ++at;
    MailboxDecl d;
    d.name = expect(Tok::Ident, "mailbox name").text;
    expect_kw("cap");
    d.capacity = std::stoi(expect(Tok::Number, "capacity").text);
    expect(Tok::Semi, "';'");
    m.mailboxes.push_back(d);
  }

  void parse_var() {
    ++at;
    VarDecl v;
    v.name = expect(Tok::Ident, "variable name").text;
    expect(Tok::Colon, "':'");
    v.domain = expect(Tok::Ident, "domain name").text;
    expect(Tok::Eq, "'='");
    v.init = value_token();
    expect(Tok::Semi, "';'");
    m.vars.push_back(v);
  }

  void parse_effect() {
    ++at;
    std::string action = expect(Tok::Ident, "action name").text;
    expect(Tok::LBrace, "'{'");
    std::vector<EffectBranch> branches;
    EffectBranch br;
    auto flush = [&]() {
      branches.push_back(br);
      br = EffectBranch{};
    };
    while (true) {
      std::string var = expect(Tok::Ident, "variable name").text;
      expect(Tok::Assign, "':='");
      std::string val;
      if (cur().kind == Tok::Ident || cur().kind == Tok::Number)
        val = toks[at++].text;
      else
        fail("a value");
      br.assigns.push_back({var, val});
      if (accept(Tok::Comma)) continue;
      if (accept(Tok::Bar)) {
        flush();
        continue;
      }
      break;
    }
    flush();
    expect(Tok::RBrace, "'}'");
    expect(Tok::Semi, "';'");
    m.effects[action] = std::move(branches);
  }

  void parse_proc() {
    ++at;
    RawProc p;
    p.name = expect(Tok::Ident, "process name").text;
    if (accept(Tok::LParen)) {
      do {
        std::string v = expect(Tok::Ident, "parameter name").text;
        expect(Tok::Colon, "':'");
        std::string d = expect(Tok::Ident, "domain name").text;
        p.params.push_back({v, d});
      } while (accept(Tok::Comma));
      expect(Tok::RParen, "')'");
    }
    expect(Tok::Eq, "'='");
    for (const auto& [v, _] : p.params) data_scope.push_back(v);
    p.body = parse_term();
    data_scope.resize(data_scope.size() - p.params.size());
    expect(Tok::Semi, "';'");
    raw_procs.push_back(std::move(p));
  }

  void parse_system() {
    ++at;
    expect(Tok::Eq, "'='");
    raw_system = parse_term();
    expect(Tok::Semi, "';'");
  }

  void parse_spec() {
    ++at;
    expect(Tok::Eq, "'='");
    raw_spec = parse_term();
    expect(Tok::Semi, "';'");
  }

  // ---- terms ---------------------------------------------------------------

  TermPtr parse_term() { return parse_sum(); }

  TermPtr parse_sum() {
    if (is_kw("sum")) {
      ++at;
      std::string binder = expect(Tok::Ident, "binder").text;
      expect(Tok::Colon, "':'");
      std::string domain = expect(Tok::Ident, "domain name").text;
      expect(Tok::Dot, "'.'");
      data_scope.push_back(binder);
      TermPtr body = parse_sum();
      data_scope.pop_back();
      auto dit = m.domains.find(domain);
      if (dit == m.domains.end()) throw UndeclaredName(domain);
      if (dit->second.empty()) throw ModelError("empty domain " + domain);
      TermPtr out;
      for (auto it = dit->second.rbegin(); it != dit->second.rend(); ++it) {
        TermPtr inst = subst_all(body, binder, *it);
        out = out ? t_alt(inst, out) : inst;
      }
      return out;
    }
    return parse_alt();
  }

  TermPtr parse_alt() {
    TermPtr t = parse_mergelevel();
    while (cur().kind == Tok::Plus) {
      ++at;
      TermPtr r =
          is_kw("sum") ? parse_sum() : parse_mergelevel();
      t = t_alt(t, r);
    }
    return t;
  }

  TermPtr parse_mergelevel() {
    TermPtr t = parse_seq();
    while (true) {
      if (cur().kind == Tok::Bar2) {
        ++at;
        t = t_merge(t, parse_seq());
      } else if (cur().kind == Tok::Bar3) {
        ++at;
        t = t_par(t, parse_seq());
      } else if (cur().kind == Tok::Bar) {
        ++at;
        t = t_comm(t, parse_seq());
      } else {
        break;
      }
    }
    return t;
  }

  TermPtr parse_seq() {
    TermPtr t = parse_prefix();
    if (cur().kind == Tok::Dot) {
      ++at;
      return t_seq(t, parse_seq());
    }
    return t;
  }

  TermPtr parse_prefix() {
    if (cur().kind == Tok::LBracket) {
      ++at;
      GuardPtr g = parse_guard();
      expect(Tok::RBracket, "']'");
      TermPtr gt = t_guard(g);
      if (accept(Tok::Arrow)) return t_seq(gt, parse_prefix());
      return gt;
    }
    return parse_primary();
  }

  std::set<std::string> parse_name_set() {
    expect(Tok::LBrace, "'{'");
    std::set<std::string> names;
    if (cur().kind != Tok::RBrace) {
      names.insert(expect(Tok::Ident, "name").text);
      while (accept(Tok::Comma))
        names.insert(expect(Tok::Ident, "name").text);
    }
    expect(Tok::RBrace, "'}'");
    return names;
  }

  TermPtr parse_primary() {
    if (accept(Tok::LParen)) {
      TermPtr t = parse_term();
      expect(Tok::RParen, "')'");
      return t;
    }
    if (cur().kind == Tok::At) {
      ++at;
      ActionLabel base;
      base.name = expect(Tok::Ident, "shadow base action").text;
      base.kind = ActionKind::Visible;
      if (accept(Tok::LParen)) {
        base.args.push_back(value_token());
        while (accept(Tok::Comma)) base.args.push_back(value_token());
        expect(Tok::RParen, "')'");
      }
      int index = 0;  // 0 = assign later
      if (accept(Tok::Hash))
        index = std::stoi(expect(Tok::Number, "shadow index").text);
      return t_shadow(std::move(base), index);
    }
    if (cur().kind != Tok::Ident) fail("a term");
    std::string name = toks[at++].text;
    if (name == "delta") return t_delta();
    if (name == "tau") return t_tau();
    if (name == "eps") return t_eps();
    if (name == "theta") {
      expect(Tok::LParen, "'('");
      TermPtr t = parse_term();
      expect(Tok::RParen, "')'");
      return t_theta(t);
    }
    if (name == "unless") {
      expect(Tok::LParen, "'('");
      TermPtr l = parse_term();
      expect(Tok::Comma, "','");
      TermPtr r = parse_term();
      expect(Tok::RParen, "')'");
      return t_unless(l, r);
    }
    if (name == "new") {
      expect(Tok::LParen, "'('");
      TermPtr t = parse_term();
      expect(Tok::RParen, "')'");
      return t_new(t);
    }
    if (name == "encap" || name == "hide") {
      expect(Tok::LParen, "'('");
      std::set<std::string> names = parse_name_set();
      expect(Tok::Comma, "','");
      TermPtr t = parse_term();
      expect(Tok::RParen, "')'");
      return name == "encap" ? t_encap(std::move(names), t)
                             : t_hide(std::move(names), t);
    }
    // Action or process reference.
    std::vector<std::string> args;
    bool has_args = false;
    if (accept(Tok::LParen)) {
      has_args = true;
      if (cur().kind != Tok::RParen) {
        args.push_back(value_token());
        while (accept(Tok::Comma)) args.push_back(value_token());
      }
      expect(Tok::RParen, "')'");
    }
    if (m.actions.count(name)) {
      const auto& sig = m.actions[name];
      if (args.size() != sig.domains.size())
        throw ArityMismatch(name + " expects " +
                            std::to_string(sig.domains.size()) +
                            " argument(s), got " + std::to_string(args.size()));
      for (size_t i = 0; i < args.size(); ++i) {
        if (in_scope(args[i])) continue;
        const auto& dom = m.domains.at(sig.domains[i]);
        if (std::find(dom.begin(), dom.end(), args[i]) == dom.end())
          throw UndeclaredName(args[i]);
      }
      return t_act(name, std::move(args));
    }
    // Process reference, resolved after all procs are read.
    std::string ref = name;
    if (has_args) {
      ref += "(";
      for (size_t i = 0; i < args.size(); ++i) {
        if (i) ref += ",";
        ref += args[i];
      }
      ref += ")";
    }
    return t_recvar(ref);
  }

  GuardPtr parse_guard() {
    GuardPtr g = parse_guard_seq();
    while (accept(Tok::Plus)) g = g_alt(g, parse_guard_seq());
    return g;
  }

  GuardPtr parse_guard_seq() {
    GuardPtr g = parse_guard_par();
    while (accept(Tok::Dot)) g = g_seq(g, parse_guard_par());
    return g;
  }

  GuardPtr parse_guard_par() {
    GuardPtr g = parse_guard_unary();
    while (accept(Tok::Amp)) g = g_par(g, parse_guard_unary());
    return g;
  }

  GuardPtr parse_guard_unary() {
    if (accept(Tok::Bang)) return g_not(parse_guard_unary());
    if (accept(Tok::LParen)) {
      GuardPtr g = parse_guard();
      expect(Tok::RParen, "')'");
      return g;
    }
    if (cur().kind == Tok::Ident && cur().text == "eps") {
      ++at;
      return g_true();
    }
    if (cur().kind == Tok::Ident && cur().text == "delta") {
      ++at;
      return g_false();
    }
    std::string var = expect(Tok::Ident, "a guard").text;
    expect(Tok::Eq, "'='");
    std::string val = value_token();
    return g_atom(var, {val});
  }

  // ---- expansion -----------------------------------------------------------

  void instantiate_procs() {
    RecursiveSpec spec;
    spec.name = "main";
    std::set<std::string> defined;
    for (const auto& p : raw_procs) {
      std::vector<std::vector<std::string>> combos{{}};
      for (const auto& [v, d] : p.params) {
        auto dit = m.domains.find(d);
        if (dit == m.domains.end()) throw UndeclaredName(d);
        std::vector<std::vector<std::string>> next;
        for (const auto& c : combos)
          for (const auto& val : dit->second) {
            auto cc = c;
            cc.push_back(val);
            next.push_back(std::move(cc));
          }
        combos = std::move(next);
      }
      for (const auto& combo : combos) {
        TermPtr body = p.body;
        for (size_t i = 0; i < combo.size(); ++i)
          body = subst_all(body, p.params[i].first, combo[i]);
        std::string eq = mangle(p.name, combo);
        if (!defined.insert(eq).second)
          throw ModelError("duplicate process equation " + eq);
        spec.equations.push_back({eq, body});
      }
    }
    // Resolve raw references: RecVar("Name(a,b)") -> RecVar(mangled).
    for (auto& [var, rhs] : spec.equations) rhs = resolve_refs(rhs, spec);
    m.specs.push_back(std::move(spec));
  }

  TermPtr resolve_refs(const TermPtr& t, const RecursiveSpec& spec) {
    if (!t) return t;
    if (t->kind == TermKind::RecVar) {
      std::string name;
      std::vector<std::string> args;
      if (!split_ref(t->var, name, args))
        throw UndeclaredName(t->var);
      std::string eq = mangle(name, args);
      if (!spec.find(eq)) throw UndeclaredName(t->var);
      return t_recvar(eq);
    }
    switch (t->kind) {
      case TermKind::Seq:
        return t_seq(resolve_refs(t->l, spec), resolve_refs(t->r, spec));
      case TermKind::Alt:
        return t_alt(resolve_refs(t->l, spec), resolve_refs(t->r, spec));
      case TermKind::Par:
        return t_par(resolve_refs(t->l, spec), resolve_refs(t->r, spec));
      case TermKind::Comm:
        return t_comm(resolve_refs(t->l, spec), resolve_refs(t->r, spec));
      case TermKind::Merge:
        return t_merge(resolve_refs(t->l, spec), resolve_refs(t->r, spec));
      case TermKind::Theta:
        return t_theta(resolve_refs(t->l, spec));
      case TermKind::Unless:
        return t_unless(resolve_refs(t->l, spec), resolve_refs(t->r, spec));
      case TermKind::Encap:
        return t_encap(t->names, resolve_refs(t->l, spec));
      case TermKind::Hide:
        return t_hide(t->names, resolve_refs(t->l, spec));
      case TermKind::New:
        return t_new(resolve_refs(t->l, spec));
      default:
        return t;
    }
  }

  // Turns RecVars in a top-level term into RecCalls on "main".
  TermPtr close_term(const TermPtr& t) {
    if (!t) return t;
    if (t->kind == TermKind::RecVar) {
      std::string name;
      std::vector<std::string> args;
      if (!split_ref(t->var, name, args)) throw UndeclaredName(t->var);
      std::string eq = mangle(name, args);
      const RecursiveSpec* sp = m.find_spec("main");
      if (!sp || !sp->find(eq)) throw UndeclaredName(t->var);
      return t_reccall(eq, "main");
    }
    switch (t->kind) {
      case TermKind::Seq:
        return t_seq(close_term(t->l), close_term(t->r));
      case TermKind::Alt:
        return t_alt(close_term(t->l), close_term(t->r));
      case TermKind::Par:
        return t_par(close_term(t->l), close_term(t->r));
      case TermKind::Comm:
        return t_comm(close_term(t->l), close_term(t->r));
      case TermKind::Merge:
        return t_merge(close_term(t->l), close_term(t->r));
      case TermKind::Theta:
        return t_theta(close_term(t->l));
      case TermKind::Unless:
        return t_unless(close_term(t->l), close_term(t->r));
      case TermKind::Encap:
        return t_encap(t->names, close_term(t->l));
      case TermKind::Hide:
        return t_hide(t->names, close_term(t->l));
      case TermKind::New:
        return t_new(close_term(t->l));
      default:
        return t;
    }
  }

  void instantiate_comms() {
    for (const auto& rule : raw_comms) {
      auto ait = m.actions.find(rule.a.name);
      auto bit = m.actions.find(rule.b.name);
      auto rit = m.actions.find(rule.result.name);
      if (ait == m.actions.end()) throw UndeclaredName(rule.a.name);
      if (bit == m.actions.end()) throw UndeclaredName(rule.b.name);
      if (rit == m.actions.end()) throw UndeclaredName(rule.result.name);
      if (rule.a.args.size() != ait->second.domains.size())
        throw ArityMismatch(rule.a.name);
      if (rule.b.args.size() != bit->second.domains.size())
        throw ArityMismatch(rule.b.name);
      if (rule.result.args.size() != rit->second.domains.size())
        throw ArityMismatch(rule.result.name);

      // Collect pattern variables with their domains.
      std::map<std::string, std::string> var_domain;
      auto scan = [&](const ActionLabel& pat, const ActionSignature& sig) {
        for (size_t i = 0; i < pat.args.size(); ++i) {
          const auto& dom = m.domains.at(sig.domains[i]);
          if (std::find(dom.begin(), dom.end(), pat.args[i]) != dom.end())
            continue;  // constant value
          auto it = var_domain.find(pat.args[i]);
          if (it == var_domain.end())
            var_domain[pat.args[i]] = sig.domains[i];
          else if (it->second != sig.domains[i])
            throw ModelError("pattern variable '" + pat.args[i] +
                             "' used with two domains");
        }
      };
      scan(rule.a, ait->second);
      scan(rule.b, bit->second);
      for (size_t i = 0; i < rule.result.args.size(); ++i) {
        const auto& dom = m.domains.at(rit->second.domains[i]);
        if (std::find(dom.begin(), dom.end(), rule.result.args[i]) !=
            dom.end())
          continue;
        if (!var_domain.count(rule.result.args[i]))
          throw UndeclaredName(rule.result.args[i]);
      }

      std::vector<std::map<std::string, std::string>> valuations{{}};
      for (const auto& [v, d] : var_domain) {
        std::vector<std::map<std::string, std::string>> next;
        for (const auto& base : valuations)
          for (const auto& val : m.domains.at(d)) {
            auto nv = base;
            nv[v] = val;
            next.push_back(std::move(nv));
          }
        valuations = std::move(next);
      }
      auto ground = [&](const ActionLabel& pat,
                        const std::map<std::string, std::string>& val) {
        ActionLabel g = pat;
        for (auto& a : g.args) {
          auto it = val.find(a);
          if (it != val.end()) a = it->second;
        }
        return g;
      };
      for (const auto& val : valuations) {
        ActionLabel a = ground(rule.a, val);
        ActionLabel b = ground(rule.b, val);
        ActionLabel r = ground(rule.result, val);
        auto existing = m.gamma.find({a, b});
        if (existing != m.gamma.end() && !(existing->second == r))
          throw AsymmetricGamma(a.text() + " | " + b.text());
        m.gamma[{a, b}] = r;
        auto rev = m.gamma.find({b, a});
        if (rev != m.gamma.end() && !(rev->second == r))
          throw AsymmetricGamma(b.text() + " | " + a.text());
        m.gamma[{b, a}] = r;
      }
    }
  }

  void assign_shadow_indices() {
    std::map<ActionLabel, int> next_index;
    std::set<std::pair<ActionLabel, int>> used;
    std::function<void(const TermPtr&)> scan_explicit =
        [&](const TermPtr& t) {
          if (!t) return;
          if (t->kind == TermKind::Shadow && t->shadow_index != 0) {
            if (!used.insert({t->act, t->shadow_index}).second)
              throw ModelError("duplicate shadow index #" +
                               std::to_string(t->shadow_index) + " for " +
                               t->act.text());
          }
          scan_explicit(t->l);
          scan_explicit(t->r);
        };
    std::function<TermPtr(const TermPtr&)> assign = [&](const TermPtr& t)
        -> TermPtr {
      if (!t) return t;
      if (t->kind == TermKind::Shadow) {
        if (t->shadow_index != 0) return t;
        int idx = ++next_index[t->act];
        while (used.count({t->act, idx})) idx = ++next_index[t->act];
        used.insert({t->act, idx});
        return t_shadow(t->act, idx);
      }
      switch (t->kind) {
        case TermKind::Seq:
          return t_seq(assign(t->l), assign(t->r));
        case TermKind::Alt:
          return t_alt(assign(t->l), assign(t->r));
        case TermKind::Par:
          return t_par(assign(t->l), assign(t->r));
        case TermKind::Comm:
          return t_comm(assign(t->l), assign(t->r));
        case TermKind::Merge:
          return t_merge(assign(t->l), assign(t->r));
        case TermKind::Theta:
          return t_theta(assign(t->l));
        case TermKind::Unless:
          return t_unless(assign(t->l), assign(t->r));
        case TermKind::Encap:
          return t_encap(t->names, assign(t->l));
        case TermKind::Hide:
          return t_hide(t->names, assign(t->l));
        case TermKind::New:
          return t_new(assign(t->l));
        default:
          return t;
      }
    };
    for (auto& sp : m.specs)
      for (auto& [var, rhs] : sp.equations) scan_explicit(rhs);
    if (m.system) scan_explicit(m.system);
    if (m.spec_term) scan_explicit(m.spec_term);
    for (auto& sp : m.specs)
      for (auto& [var, rhs] : sp.equations) rhs = assign(rhs);
    if (m.system) m.system = assign(m.system);
    if (m.spec_term) m.spec_term = assign(m.spec_term);
  }

  void derive_sendable() {
    for (const auto& sig : m.action_order) {
      if (sig.sends_mailbox.empty()) continue;
      if (!m.find_mailbox(sig.sends_mailbox))
        throw UndeclaredName(sig.sends_mailbox);
      std::vector<std::vector<std::string>> tuples{{}};
      for (const auto& d : sig.domains) {
        std::vector<std::vector<std::string>> next;
        for (const auto& base : tuples)
          for (const auto& v : m.domains.at(d)) {
            auto t = base;
            t.push_back(v);
            next.push_back(std::move(t));
          }
        tuples = std::move(next);
      }
      for (auto& t : tuples) m.sendable[sig.sends_mailbox].insert(t);
    }
    for (const auto& sig : m.action_order)
      if (!sig.receives_mailbox.empty() &&
          !m.find_mailbox(sig.receives_mailbox))
        throw UndeclaredName(sig.receives_mailbox);
  }

  void collect_sets(const TermPtr& t) {
    if (!t) return;
    if (t->kind == TermKind::Encap)
      m.encap_set.insert(t->names.begin(), t->names.end());
    if (t->kind == TermKind::Hide)
      m.hide_set.insert(t->names.begin(), t->names.end());
    collect_sets(t->l);
    collect_sets(t->r);
  }

  void finish() {
    for (const auto& sig : m.action_order)
      for (const auto& d : sig.domains)
        if (!m.domains.count(d)) throw UndeclaredName(d);
    instantiate_procs();
    instantiate_comms();
    if (raw_system) m.system = close_term(raw_system);
    if (raw_spec) m.spec_term = close_term(raw_spec);
    assign_shadow_indices();
    derive_sendable();
    if (m.system) collect_sets(m.system);
    m.validate();
  }
};

}  // namespace

Model parse_model(const std::string& text) {
  Lexer lex(text);
  lex.run();
  Parser p;
  p.toks = std::move(lex.tokens);
  p.parse();
  return std::move(p.m);
}

TermPtr parse_term_in_context(const Model& m, const std::string& text) {
  Lexer lex(text);
  lex.run();
  Parser p;
  p.toks = std::move(lex.tokens);
  p.m = m;
  TermPtr t = p.parse_term();
  if (p.cur().kind != Tok::End) p.fail("end of term");
  return p.close_term(t);
}

}  // namespace aptc
