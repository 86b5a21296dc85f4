#include <cctype>
#include <charconv>
#include <cstdlib>
#include <utility>

#include "sigfuzz/ir.hpp"

namespace sigfuzz {

std::string Diagnostic::to_string() const {
  std::string s;
  if (pos.line > 0) {
    s += std::to_string(pos.line);
    s += ":";
    s += std::to_string(pos.col);
    s += ": ";
  }
  s += message;
  return s;
}

namespace {

enum class Tok : uint8_t { Ident, Int, Float, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int64_t int_val = 0;
  double float_val = 0.0;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return cur_; }
  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_ws();
    cur_ = Token{};
    cur_.pos = {line_, col_};
    if (i_ >= text_.size()) {
      cur_.kind = Tok::End;
      return;
    }
    char c = text_[i_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = i_;
      while (i_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_'))
        bump();
      cur_.kind = Tok::Ident;
      cur_.text = text_.substr(start, i_ - start);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      lex_number();
      return;
    }
    // punctuation, longest match first
    static const char* two_char[] = {"==", "!=", "<=", ">=", "&&", "||", "++", "->"};
    if (i_ + 1 < text_.size()) {
      std::string pair = text_.substr(i_, 2);
      for (const char* p : two_char) {
        if (pair == p) {
          cur_.kind = Tok::Punct;
          cur_.text = pair;
          bump();
          bump();
          return;
        }
      }
    }
    cur_.kind = Tok::Punct;
    cur_.text = std::string(1, c);
    bump();
  }

  void lex_number() {
    size_t start = i_;
    bool is_float = false;
    while (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) bump();
    if (i_ < text_.size() && text_[i_] == '.' && i_ + 1 < text_.size() &&
        std::isdigit(static_cast<unsigned char>(text_[i_ + 1]))) {
      is_float = true;
      bump();
      while (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) bump();
    }
    if (i_ < text_.size() && (text_[i_] == 'e' || text_[i_] == 'E')) {
      size_t save = i_;
      bump();
      if (i_ < text_.size() && (text_[i_] == '+' || text_[i_] == '-')) bump();
      if (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) {
        is_float = true;
        while (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) bump();
      } else {
        i_ = save;  // not an exponent after all
      }
    }
    std::string s = text_.substr(start, i_ - start);
    if (is_float) {
      cur_.kind = Tok::Float;
      cur_.float_val = std::strtod(s.c_str(), nullptr);
    } else {
      cur_.kind = Tok::Int;
      cur_.int_val = std::strtoll(s.c_str(), nullptr, 10);
    }
    cur_.text = std::move(s);
  }

  void skip_ws() {
    while (i_ < text_.size()) {
      char c = text_[i_];
      if (c == '#') {
        while (i_ < text_.size() && text_[i_] != '\n') bump();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (text_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  const std::string& text_;
  size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token cur_;
};

struct ParseError {
  Diagnostic diag;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  ModelIR parse() {
    ModelIR m;
    bool saw_model = false;
    while (lex_.peek().kind != Tok::End) {
      Token t = expect_ident("directive");
      if (t.text == "model") {
        parse_model_header(m);
        saw_model = true;
      } else if (t.text == "port") {
        m.ports.push_back(parse_port());
      } else if (t.text == "block") {
        m.blocks.push_back(parse_block());
      } else if (t.text == "link") {
        m.links.push_back(parse_link());
      } else {
        fail(t.pos, "unknown directive '" + t.text + "'");
      }
    }
    if (!saw_model) fail({1, 1}, "missing 'model' header");
    return m;
  }

 private:
  [[noreturn]] void fail(SourcePos pos, const std::string& msg) {
    throw ParseError{Diagnostic{pos, msg}};
  }

  Token expect_ident(const char* what) {
    Token t = lex_.take();
    if (t.kind != Tok::Ident) fail(t.pos, std::string("expected ") + what);
    return t;
  }

  Token expect_punct(const std::string& p) {
    Token t = lex_.take();
    if (t.kind != Tok::Punct || t.text != p) fail(t.pos, "expected '" + p + "'");
    return t;
  }

  bool eat_punct(const std::string& p) {
    if (lex_.peek().kind == Tok::Punct && lex_.peek().text == p) {
      lex_.take();
      return true;
    }
    return false;
  }

  bool peek_ident(const std::string& s) {
    return lex_.peek().kind == Tok::Ident && lex_.peek().text == s;
  }

  int64_t expect_int(const char* what) {
    bool neg = eat_punct("-");
    Token t = lex_.take();
    if (t.kind != Tok::Int) fail(t.pos, std::string("expected integer ") + what);
    return neg ? -t.int_val : t.int_val;
  }

  double expect_number(const char* what) {
    bool neg = eat_punct("-");
    Token t = lex_.take();
    if (t.kind == Tok::Int) return neg ? -static_cast<double>(t.int_val) : static_cast<double>(t.int_val);
    if (t.kind == Tok::Float) return neg ? -t.float_val : t.float_val;
    fail(t.pos, std::string("expected number ") + what);
  }

  void parse_model_header(ModelIR& m) {
    Token name = expect_ident("model name");
    m.name = name.text;
    Token k = expect_ident("'samples'");
    if (k.text != "samples") fail(k.pos, "expected 'samples=<N>'");
    expect_punct("=");
    m.sample_count = static_cast<int>(expect_int("sample count"));
  }

  ValueType parse_type(const Token& t, int* width_out) {
    std::string s = t.text;
    int width = 1;
    // optional xW suffix, e.g. int32x3
    auto xpos = s.rfind('x');
    if (xpos != std::string::npos && xpos + 1 < s.size() &&
        std::isdigit(static_cast<unsigned char>(s[xpos + 1]))) {
      width = std::atoi(s.c_str() + xpos + 1);
      s = s.substr(0, xpos);
    }
    if (width_out) *width_out = width;
    if (s == "bool") return ValueType::Bool;
    if (s == "int8") return ValueType::I8;
    if (s == "int16") return ValueType::I16;
    if (s == "int32") return ValueType::I32;
    if (s == "float64") return ValueType::F64;
    fail(t.pos, "unknown type '" + s + "'");
  }

  PortDecl parse_port() {
    PortDecl p;
    Token id = expect_ident("port id");
    p.id = id.text;
    p.pos = id.pos;
    Token dir = expect_ident("'in' or 'out'");
    if (dir.text == "in")
      p.direction = PortDirection::In;
    else if (dir.text == "out")
      p.direction = PortDirection::Out;
    else
      fail(dir.pos, "expected 'in' or 'out'");
    Token kind = expect_ident("'signal' or 'const'");
    if (kind.text == "signal")
      p.kind = PortKind::Signal;
    else if (kind.text == "const")
      p.kind = PortKind::Constant;
    else
      fail(kind.pos, "expected 'signal' or 'const'");
    Token ty = expect_ident("port type");
    p.value_type = parse_type(ty, &p.width);
    while (lex_.peek().kind == Tok::Ident) {
      if (peek_ident("range")) {
        lex_.take();
        double lo = expect_number("range min");
        double hi = expect_number("range max");
        p.range = {lo, hi};
      } else if (peek_ident("candidates")) {
        lex_.take();
        p.candidates.push_back(expect_number("candidate"));
        while (eat_punct(",")) p.candidates.push_back(expect_number("candidate"));
      } else {
        break;  // next directive
      }
    }
    return p;
  }

  Block parse_block() {
    Block b;
    Token id = expect_ident("block id");
    b.id = id.text;
    b.pos = id.pos;
    Token kind = expect_ident("block kind");
    auto k = block_kind_from(kind.text);
    if (!k) fail(kind.pos, "unknown block kind '" + kind.text + "'");
    b.kind = *k;
    if (b.kind == BlockKind::Script) {
      parse_script_groups(b);
    } else if (eat_punct("{")) {
      parse_params(b);
    }
    return b;
  }

  void parse_params(Block& b) {
    if (eat_punct("}")) return;
    for (;;) {
      Token key = expect_ident("param name");
      expect_punct("=");
      // Param values run until ',' or '}' and are re-assembled verbatim;
      // they get interpreted per block kind during validation.
      std::string value;
      while (true) {
        const Token& t = lex_.peek();
        if (t.kind == Tok::End) fail(t.pos, "unterminated block params");
        if (t.kind == Tok::Punct && (t.text == "," || t.text == "}")) break;
        value += lex_.take().text;
      }
      // values may be quoted for readability: op="<=" and op=<= are the same
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
        value = value.substr(1, value.size() - 2);
      if (b.params.count(key.text)) fail(key.pos, "duplicate param '" + key.text + "'");
      b.params[key.text] = value;
      if (eat_punct("}")) break;
      expect_punct(",");
    }
  }

  void parse_script_groups(Block& b) {
    bool saw_body = false;
    while (lex_.peek().kind == Tok::Ident) {
      Token g = lex_.take();
      if (g.text == "in") {
        expect_punct("{");
        parse_pins(b.inputs);
      } else if (g.text == "out") {
        expect_punct("{");
        parse_pins(b.outputs);
      } else if (g.text == "state") {
        expect_punct("{");
        parse_state(b);
      } else if (g.text == "body") {
        expect_punct("{");
        b.body = parse_stmts();
        saw_body = true;
        break;
      } else {
        fail(g.pos, "expected in{...}, out{...}, state{...} or body{...}");
      }
    }
    if (!saw_body) fail(b.pos, "script block '" + b.id + "' has no body{...}");
  }

  void parse_pins(std::vector<ScriptPin>& pins) {
    if (eat_punct("}")) return;
    for (;;) {
      Token name = expect_ident("pin name");
      expect_punct(":");
      Token ty = expect_ident("pin type");
      int width = 1;
      ValueType vt = parse_type(ty, &width);
      if (width != 1) fail(ty.pos, "script pins are scalar");
      pins.push_back(ScriptPin{name.text, vt});
      if (eat_punct("}")) break;
      expect_punct(",");
    }
  }

  void parse_state(Block& b) {
    if (eat_punct("}")) return;
    for (;;) {
      Token name = expect_ident("state var name");
      expect_punct(":");
      Token ty = expect_ident("state var type");
      int width = 1;
      ValueType vt = parse_type(ty, &width);
      if (width != 1) fail(ty.pos, "state vars are scalar");
      expect_punct("=");
      Value init;
      if (peek_ident("true") || peek_ident("false")) {
        Token bv = lex_.take();
        if (vt != ValueType::Bool) fail(bv.pos, "bool initializer for non-bool state var");
        init = Value::of_bool(bv.text == "true");
      } else {
        double v = expect_number("state initializer");
        init = coerce(vt, Value::of_double(v));
      }
      b.state_vars.push_back(StateVar{name.text, vt, init});
      if (eat_punct("}")) break;
      expect_punct(",");
    }
  }

  // --- statements -----------------------------------------------------------

  std::vector<StmtPtr> parse_stmts() {
    std::vector<StmtPtr> out;
    while (!eat_punct("}")) {
      if (lex_.peek().kind == Tok::End) fail(lex_.peek().pos, "unterminated body");
      out.push_back(parse_stmt());
    }
    return out;
  }

  StmtPtr parse_stmt() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::Ident && t.text == "if") return parse_if();
    if (t.kind == Tok::Ident && t.text == "while") return parse_while();
    // assignment or expression statement
    auto s = std::make_unique<Stmt>();
    s->pos = t.pos;
    if (t.kind == Tok::Ident && t.text != "true" && t.text != "false") {
      // lookahead for '='
      Token ident = lex_.take();
      if (lex_.peek().kind == Tok::Punct && lex_.peek().text == "=") {
        lex_.take();
        s->kind = StmtKind::Assign;
        s->target = ident.text;
        s->expr = parse_expr();
        expect_punct(";");
        return s;
      }
      // re-parse as expression starting from the ident
      ExprPtr base = make_var(ident.text, ident.pos);
      base = parse_postfix_tail(std::move(base));
      s->kind = StmtKind::ExprStmt;
      s->expr = parse_expr_continued(std::move(base), 0);
      expect_punct(";");
      return s;
    }
    s->kind = StmtKind::ExprStmt;
    s->expr = parse_expr();
    expect_punct(";");
    return s;
  }

  StmtPtr parse_if() {
    Token kw = lex_.take();  // 'if'
    auto s = std::make_unique<Stmt>();
    s->kind = StmtKind::If;
    s->pos = kw.pos;
    expect_punct("(");
    s->expr = parse_expr();
    expect_punct(")");
    expect_punct("{");
    s->then_body = parse_stmts();
    if (peek_ident("else")) {
      lex_.take();
      if (peek_ident("if")) {
        s->else_body.push_back(parse_if());
      } else {
        expect_punct("{");
        s->else_body = parse_stmts();
      }
    }
    return s;
  }

  StmtPtr parse_while() {
    Token kw = lex_.take();  // 'while'
    auto s = std::make_unique<Stmt>();
    s->kind = StmtKind::While;
    s->pos = kw.pos;
    expect_punct("(");
    s->expr = parse_expr();
    expect_punct(")");
    expect_punct("{");
    s->then_body = parse_stmts();
    return s;
  }

  // --- expressions (precedence climbing) ------------------------------------
  // levels: 0 '||'  1 '&&'  2 '==' '!='  3 '<' '<=' '>' '>='  4 '+' '-'  5 '*' '/'

  static int binop_level(const std::string& p, BinOp* op) {
    if (p == "||") { *op = BinOp::Or; return 0; }
    if (p == "&&") { *op = BinOp::And; return 1; }
    if (p == "==") { *op = BinOp::Eq; return 2; }
    if (p == "!=") { *op = BinOp::Ne; return 2; }
    if (p == "<") { *op = BinOp::Lt; return 3; }
    if (p == "<=") { *op = BinOp::Le; return 3; }
    if (p == ">") { *op = BinOp::Gt; return 3; }
    if (p == ">=") { *op = BinOp::Ge; return 3; }
    if (p == "+") { *op = BinOp::Add; return 4; }
    if (p == "-") { *op = BinOp::Sub; return 4; }
    if (p == "*") { *op = BinOp::Mul; return 5; }
    if (p == "/") { *op = BinOp::Div; return 5; }
    return -1;
  }

  ExprPtr parse_expr() { return parse_binary(0); }

  ExprPtr parse_binary(int min_level) {
    ExprPtr lhs = parse_unary();
    return parse_expr_continued(std::move(lhs), min_level);
  }

  ExprPtr parse_expr_continued(ExprPtr lhs, int min_level) {
    for (;;) {
      const Token& t = lex_.peek();
      if (t.kind != Tok::Punct) return lhs;
      BinOp op;
      int level = binop_level(t.text, &op);
      if (level < min_level) return lhs;
      SourcePos pos = t.pos;
      lex_.take();
      ExprPtr rhs = parse_binary(level + 1);  // left-associative
      lhs = make_binary(op, std::move(lhs), std::move(rhs), pos);
    }
  }

  ExprPtr parse_unary() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::Punct && t.text == "!") {
      Token op = lex_.take();
      return make_unary(UnOp::Not, parse_unary(), op.pos);
    }
    if (t.kind == Tok::Punct && t.text == "-") {
      Token op = lex_.take();
      return make_unary(UnOp::Neg, parse_unary(), op.pos);
    }
    return parse_postfix();
  }

  ExprPtr parse_postfix() {
    ExprPtr e = parse_primary();
    return parse_postfix_tail(std::move(e));
  }

  ExprPtr parse_postfix_tail(ExprPtr e) {
    while (lex_.peek().kind == Tok::Punct && lex_.peek().text == "++") {
      Token op = lex_.take();
      if (e->kind != ExprKind::Var) fail(op.pos, "'++' applies to a variable");
      e = make_post_inc(std::move(e), op.pos);
    }
    return e;
  }

  ExprPtr parse_primary() {
    Token t = lex_.take();
    if (t.kind == Tok::Int) return make_int_lit(t.int_val, t.pos);
    if (t.kind == Tok::Float) return make_float_lit(t.float_val, t.pos);
    if (t.kind == Tok::Ident) {
      if (t.text == "true") return make_bool_lit(true, t.pos);
      if (t.text == "false") return make_bool_lit(false, t.pos);
      return make_var(t.text, t.pos);
    }
    if (t.kind == Tok::Punct && t.text == "(") {
      ExprPtr e = parse_expr();
      expect_punct(")");
      return e;
    }
    fail(t.pos, "expected expression");
  }

  Link parse_link() {
    Link l;
    Token src = expect_ident("link source");
    l.pos = src.pos;
    l.src.node = src.text;
    expect_punct(".");
    l.src.index = static_cast<int>(expect_int("source index"));
    expect_punct("->");
    Token dst = expect_ident("link destination");
    l.dst.node = dst.text;
    expect_punct(".");
    l.dst.index = static_cast<int>(expect_int("destination index"));
    return l;
  }

  Lexer lex_;
};

}  // namespace

// --- AST helpers ------------------------------------------------------------

const char* binop_name(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
  }
  return "?";
}

const char* block_kind_name(BlockKind k) {
  switch (k) {
    case BlockKind::Constant: return "Constant";
    case BlockKind::Add: return "Add";
    case BlockKind::Gain: return "Gain";
    case BlockKind::UnitDelay: return "UnitDelay";
    case BlockKind::RelationalOp: return "RelationalOp";
    case BlockKind::LogicOp: return "LogicOp";
    case BlockKind::Switch: return "Switch";
    case BlockKind::Saturate: return "Saturate";
    case BlockKind::Script: return "Script";
  }
  return "?";
}

std::optional<BlockKind> block_kind_from(const std::string& s) {
  if (s == "Constant") return BlockKind::Constant;
  if (s == "Add") return BlockKind::Add;
  if (s == "Gain") return BlockKind::Gain;
  if (s == "UnitDelay") return BlockKind::UnitDelay;
  if (s == "RelationalOp") return BlockKind::RelationalOp;
  if (s == "LogicOp") return BlockKind::LogicOp;
  if (s == "Switch") return BlockKind::Switch;
  if (s == "Saturate") return BlockKind::Saturate;
  if (s == "Script") return BlockKind::Script;
  return std::nullopt;
}

ExprPtr make_int_lit(int64_t v, SourcePos pos) {
  auto e = std::make_unique<Expr>();
  e->kind = ExprKind::IntLit;
  e->int_val = v;
  e->pos = pos;
  return e;
}
ExprPtr make_float_lit(double v, SourcePos pos) {
  auto e = std::make_unique<Expr>();
  e->kind = ExprKind::FloatLit;
  e->float_val = v;
  e->type = ValueType::F64;
  e->pos = pos;
  return e;
}
ExprPtr make_bool_lit(bool v, SourcePos pos) {
  auto e = std::make_unique<Expr>();
  e->kind = ExprKind::BoolLit;
  e->bool_val = v;
  e->type = ValueType::Bool;
  e->pos = pos;
  return e;
}
ExprPtr make_var(std::string name, SourcePos pos) {
  auto e = std::make_unique<Expr>();
  e->kind = ExprKind::Var;
  e->name = std::move(name);
  e->pos = pos;
  return e;
}
ExprPtr make_unary(UnOp op, ExprPtr operand, SourcePos pos) {
  auto e = std::make_unique<Expr>();
  e->kind = ExprKind::Unary;
  e->un_op = op;
  e->lhs = std::move(operand);
  e->pos = pos;
  return e;
}
ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs, SourcePos pos) {
  auto e = std::make_unique<Expr>();
  e->kind = ExprKind::Binary;
  e->bin_op = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  e->pos = pos;
  return e;
}
ExprPtr make_post_inc(ExprPtr var, SourcePos pos) {
  auto e = std::make_unique<Expr>();
  e->kind = ExprKind::PostInc;
  e->lhs = std::move(var);
  e->pos = pos;
  return e;
}

ExprPtr Expr::clone() const {
  auto e = std::make_unique<Expr>();
  e->kind = kind;
  e->pos = pos;
  e->type = type;
  e->int_val = int_val;
  e->float_val = float_val;
  e->bool_val = bool_val;
  e->name = name;
  e->slot = slot;
  e->slot_index = slot_index;
  e->un_op = un_op;
  e->bin_op = bin_op;
  if (lhs) e->lhs = lhs->clone();
  if (rhs) e->rhs = rhs->clone();
  e->decision_id = decision_id;
  e->cond_index = cond_index;
  e->is_decision_top = is_decision_top;
  return e;
}

StmtPtr Stmt::clone() const {
  auto s = std::make_unique<Stmt>();
  s->kind = kind;
  s->pos = pos;
  s->target = target;
  s->target_slot = target_slot;
  s->target_index = target_index;
  if (expr) s->expr = expr->clone();
  s->then_body.reserve(then_body.size());
  for (const auto& st : then_body) s->then_body.push_back(st->clone());
  s->else_body.reserve(else_body.size());
  for (const auto& st : else_body) s->else_body.push_back(st->clone());
  return s;
}

Block Block::clone() const {
  Block b;
  b.id = id;
  b.kind = kind;
  b.pos = pos;
  b.params = params;
  b.const_value = const_value;
  b.gain = gain;
  b.gain_is_float = gain_is_float;
  b.delay_init = delay_init;
  b.rel_op = rel_op;
  b.logic_op = logic_op;
  b.sat_lo = sat_lo;
  b.sat_hi = sat_hi;
  b.add_signs = add_signs;
  b.const_inputs = const_inputs;
  b.inputs = inputs;
  b.outputs = outputs;
  b.state_vars = state_vars;
  b.locals = locals;
  b.body.reserve(body.size());
  for (const auto& s : body) b.body.push_back(s->clone());
  b.input_count = input_count;
  b.output_count = output_count;
  b.out_type = out_type;
  return b;
}

ModelIR ModelIR::clone() const {
  ModelIR m;
  m.name = name;
  m.sample_count = sample_count;
  m.ports = ports;
  m.blocks.reserve(blocks.size());
  for (const auto& b : blocks) m.blocks.push_back(b.clone());
  m.links = links;
  m.eval_order = eval_order;
  return m;
}

const PortDecl* ModelIR::find_port(const std::string& id) const {
  for (const auto& p : ports)
    if (p.id == id) return &p;
  return nullptr;
}
const Block* ModelIR::find_block(const std::string& id) const {
  for (const auto& b : blocks)
    if (b.id == id) return &b;
  return nullptr;
}
int ModelIR::port_index(const std::string& id) const {
  for (size_t i = 0; i < ports.size(); ++i)
    if (ports[i].id == id) return static_cast<int>(i);
  return -1;
}
int ModelIR::block_index(const std::string& id) const {
  for (size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].id == id) return static_cast<int>(i);
  return -1;
}
std::vector<int> ModelIR::input_port_indices() const {
  std::vector<int> v;
  for (size_t i = 0; i < ports.size(); ++i)
    if (ports[i].direction == PortDirection::In) v.push_back(static_cast<int>(i));
  return v;
}
std::vector<int> ModelIR::output_port_indices() const {
  std::vector<int> v;
  for (size_t i = 0; i < ports.size(); ++i)
    if (ports[i].direction == PortDirection::Out) v.push_back(static_cast<int>(i));
  return v;
}

std::string Value::to_string() const {
  switch (type) {
    case ValueType::Bool: return i ? "true" : "false";
    case ValueType::F64: {
      char buf[64];
      snprintf(buf, sizeof buf, "%.17g", f);
      return buf;
    }
    default: return std::to_string(i);
  }
}

ParseResult parse_model(const std::string& text) {
  ParseResult res;
  ModelIR m;
  try {
    Parser p(text);
    m = p.parse();
  } catch (const ParseError& e) {
    res.diagnostics.push_back(e.diag);
    return res;
  }
  auto diags = validate_model(m);
  if (!diags.empty()) {
    res.diagnostics = std::move(diags);
    return res;
  }
  res.model = std::move(m);
  return res;
}

}  // namespace sigfuzz
