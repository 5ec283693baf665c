#include "rvdse/asm/assembler.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>
#include <sstream>

#include "rvdse/error.hpp"
#include "rvdse/isa/instruction.hpp"

namespace rvdse::assembler {

using isa::Mnemonic;

std::uint32_t MemoryImage::extent_words() const {
  return words.empty() ? 0 : words.rbegin()->first + 1;
}

AssemblySource AssemblySource::from_text(std::string_view text) {
  AssemblySource src;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    std::string line(text.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    src.lines.push_back(std::move(line));
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return src;
}

std::string AssemblySource::text() const {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

int parse_register(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
  if (n.size() >= 2 && n[0] == 'x') {
    int v = 0;
    auto [p, ec] = std::from_chars(n.data() + 1, n.data() + n.size(), v);
    if (ec == std::errc() && p == n.data() + n.size() && v >= 0 && v < 32) return v;
    return -1;
  }
  static const std::map<std::string, int, std::less<>> kAbi = {
      {"zero", 0}, {"ra", 1},  {"sp", 2},   {"gp", 3},   {"tp", 4},  {"t0", 5},  {"t1", 6},
      {"t2", 7},   {"s0", 8},  {"fp", 8},   {"s1", 9},   {"a0", 10}, {"a1", 11}, {"a2", 12},
      {"a3", 13},  {"a4", 14}, {"a5", 15},  {"a6", 16},  {"a7", 17}, {"s2", 18}, {"s3", 19},
      {"s4", 20},  {"s5", 21}, {"s6", 22},  {"s7", 23},  {"s8", 24}, {"s9", 25}, {"s10", 26},
      {"s11", 27}, {"t3", 28}, {"t4", 29},  {"t5", 30},  {"t6", 31},
  };
  auto it = kAbi.find(n);
  return it == kAbi.end() ? -1 : it->second;
}

namespace {

using Symbols = std::map<std::string, std::int64_t>;

struct Statement {
  int line = 0;
  std::uint32_t addr = 0;
  std::string op;
  std::vector<std::string> args;
  unsigned words = 0;
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

Error parse_error(int line, const std::string& msg) {
  return Error(ErrorKind::ParseError, msg).at_line(line);
}

bool is_symbol_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$';
}
bool is_symbol_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$';
}

std::string strip_comment(const std::string& line) {
  std::size_t cut = line.size();
  const auto hash = line.find('#');
  const auto slashes = line.find("//");
  if (hash != std::string::npos) cut = std::min(cut, hash);
  if (slashes != std::string::npos) cut = std::min(cut, slashes);
  return line.substr(0, cut);
}

// Recursive-descent evaluator: numbers, symbols, + - unary minus, parens,
// %hi(...) and %lo(...). Returns nullopt for unknown symbols when lenient.
class ExprParser {
 public:
  ExprParser(std::string_view text, const Symbols& syms, int line, bool lenient)
      : s_(text), syms_(syms), line_(line), lenient_(lenient) {}

  std::optional<std::int64_t> parse() {
    auto v = expr();
    skip_ws();
    if (pos_ != s_.size()) throw parse_error(line_, "unexpected text in expression '" + std::string(s_) + "'");
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::optional<std::int64_t> expr() {
    auto v = term();
    for (;;) {
      skip_ws();
      if (pos_ >= s_.size() || (s_[pos_] != '+' && s_[pos_] != '-')) return v;
      const char op = s_[pos_++];
      auto rhs = term();
      if (!v || !rhs) {
        v = std::nullopt;
      } else {
        v = op == '+' ? *v + *rhs : *v - *rhs;
      }
    }
  }

  std::optional<std::int64_t> term() {
    skip_ws();
    if (pos_ >= s_.size()) throw parse_error(line_, "missing operand in expression");
    const char c = s_[pos_];
    if (c == '-') {
      ++pos_;
      auto v = term();
      return v ? std::optional<std::int64_t>(-*v) : std::nullopt;
    }
    if (c == '+') {
      ++pos_;
      return term();
    }
    if (c == '(') {
      ++pos_;
      auto v = expr();
      expect(')');
      return v;
    }
    if (c == '%') {
      const auto rest = s_.substr(pos_);
      const bool hi = rest.rfind("%hi(", 0) == 0;
      const bool lo = rest.rfind("%lo(", 0) == 0;
      if (!hi && !lo) throw parse_error(line_, "unknown relocation in '" + std::string(s_) + "'");
      pos_ += 4;
      auto v = expr();
      expect(')');
      if (!v) return std::nullopt;
      const auto u = static_cast<std::uint32_t>(*v);
      if (hi) return static_cast<std::int64_t>(((u + 0x800u) >> 12) & 0xfffffu);
      const auto low = static_cast<std::int32_t>(u << 20) >> 20;
      return static_cast<std::int64_t>(low);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (is_symbol_start(c)) {
      const std::size_t b = pos_;
      while (pos_ < s_.size() && is_symbol_char(s_[pos_])) ++pos_;
      const std::string name(s_.substr(b, pos_ - b));
      auto it = syms_.find(name);
      if (it != syms_.end()) return it->second;
      if (lenient_) return std::nullopt;
      throw Error(ErrorKind::UndefinedLabel, "undefined symbol '" + name + "'").at_line(line_);
    }
    throw parse_error(line_, "bad expression '" + std::string(s_) + "'");
  }

  std::int64_t number() {
    int base = 10;
    if (s_.substr(pos_, 2) == "0x" || s_.substr(pos_, 2) == "0X") {
      base = 16;
      pos_ += 2;
    } else if (s_.substr(pos_, 2) == "0b" || s_.substr(pos_, 2) == "0B") {
      base = 2;
      pos_ += 2;
    }
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v, base);
    if (ec != std::errc()) throw parse_error(line_, "bad number in '" + std::string(s_) + "'");
    pos_ = static_cast<std::size_t>(p - s_.data());
    if (pos_ < s_.size() && is_symbol_char(s_[pos_])) {
      throw parse_error(line_, "bad number in '" + std::string(s_) + "'");
    }
    return static_cast<std::int64_t>(v);
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c) throw parse_error(line_, std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string_view s_;
  const Symbols& syms_;
  int line_;
  bool lenient_;
  std::size_t pos_ = 0;
};

std::int64_t eval(const std::string& text, const Symbols& syms, int line) {
  return *ExprParser(text, syms, line, false).parse();
}

std::optional<std::int64_t> try_eval(const std::string& text, const Symbols& syms, int line) {
  return ExprParser(text, syms, line, true).parse();
}

std::vector<std::string> split_args(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool fits12(std::int64_t v) { return v >= -2048 && v <= 2047; }

unsigned li_words(std::optional<std::int64_t> v) {
  if (!v) return 2;
  const auto u = static_cast<std::uint32_t>(*v);
  const auto s = static_cast<std::int32_t>(u);
  if (fits12(s)) return 1;
  if ((u & 0xfff) == 0) return 1;
  return 2;
}

struct FirstPass {
  std::vector<Statement> statements;
  Symbols symbols;
  std::map<std::string, std::uint32_t> labels;
};

void check_arity(const Statement& st, std::size_t n) {
  if (st.args.size() != n) {
    throw parse_error(st.line, "'" + st.op + "' expects " + std::to_string(n) + " operand(s), got " +
                                   std::to_string(st.args.size()));
  }
}

FirstPass first_pass(const AssemblySource& source) {
  FirstPass fp;
  std::uint32_t loc = 0;
  for (std::size_t i = 0; i < source.lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    std::string text = trim(strip_comment(source.lines[i]));
    // Leading labels.
    for (;;) {
      std::size_t j = 0;
      if (text.empty() || !is_symbol_start(text[0])) break;
      while (j < text.size() && is_symbol_char(text[j])) ++j;
      if (j < text.size() && text[j] == ':') {
        const std::string name = text.substr(0, j);
        if (fp.symbols.count(name)) {
          throw Error(ErrorKind::DuplicateLabel, "label '" + name + "' defined twice").at_line(line_no);
        }
        fp.symbols[name] = loc;
        fp.labels[name] = loc;
        text = trim(text.substr(j + 1));
      } else {
        break;
      }
    }
    if (text.empty()) continue;
    Statement st;
    st.line = line_no;
    const auto sp = text.find_first_of(" \t");
    st.op = lower(text.substr(0, sp));
    st.args = split_args(sp == std::string::npos ? "" : text.substr(sp + 1));
    if (st.op[0] == '.') {
      if (st.op == ".org") {
        check_arity(st, 1);
        const auto v = eval(st.args[0], fp.symbols, line_no);
        if (v < 0 || v > 0xffffffffll || (v & 3)) throw parse_error(line_no, ".org needs an aligned address");
        loc = static_cast<std::uint32_t>(v);
        continue;
      }
      if (st.op == ".equ" || st.op == ".set") {
        check_arity(st, 2);
        if (fp.symbols.count(st.args[0])) {
          throw Error(ErrorKind::DuplicateLabel, "symbol '" + st.args[0] + "' defined twice").at_line(line_no);
        }
        fp.symbols[st.args[0]] = eval(st.args[1], fp.symbols, line_no);
        continue;
      }
      if (st.op == ".align" || st.op == ".p2align") {
        check_arity(st, 1);
        const auto n = eval(st.args[0], fp.symbols, line_no);
        if (n < 0 || n > 16) throw parse_error(line_no, ".align expects 0..16");
        const std::uint32_t a = std::max(4u, 1u << n);
        const std::uint32_t target = (loc + a - 1) & ~(a - 1);
        st.addr = loc;
        st.words = (target - loc) / 4;
        st.op = ".zero-words";
        st.args.clear();
        loc = target;
        fp.statements.push_back(st);
        continue;
      }
      if (st.op == ".globl" || st.op == ".global" || st.op == ".text" || st.op == ".data" ||
          st.op == ".section") {
        continue;
      }
      if (st.op == ".word") {
        if (st.args.empty()) throw parse_error(line_no, ".word needs a value");
        st.addr = loc;
        st.words = static_cast<unsigned>(st.args.size());
      } else if (st.op == ".space" || st.op == ".zero") {
        check_arity(st, 1);
        const auto n = eval(st.args[0], fp.symbols, line_no);
        if (n < 0 || (n & 3)) throw parse_error(line_no, st.op + " needs a multiple of 4 bytes");
        st.addr = loc;
        st.words = static_cast<unsigned>(n / 4);
        st.op = ".zero-words";
        st.args.clear();
      } else {
        throw parse_error(line_no, "unknown directive '" + st.op + "'");
      }
    } else {
      st.addr = loc;
      if (st.op == "li") {
        check_arity(st, 2);
        st.words = li_words(try_eval(st.args[1], fp.symbols, line_no));
      } else if (st.op == "la") {
        st.words = 2;
      } else {
        st.words = 1;
      }
    }
    loc += st.words * 4;
    fp.statements.push_back(std::move(st));
  }
  return fp;
}

class Encoder {
 public:
  Encoder(const Symbols& syms, std::map<std::uint32_t, std::uint32_t>& out)
      : syms_(syms), out_(out) {}

  void emit(const Statement& st) {
    st_ = &st;
    addr_ = st.addr;
    try {
      encode_statement(st);
    } catch (Error& e) {
      if (!e.line()) e.at_line(st.line);
      throw;
    }
  }

 private:
  void put(std::uint32_t word) {
    const std::uint32_t w = addr_ >> 2;
    if (out_.count(w)) throw parse_error(st_->line, "overlapping code at word address " + std::to_string(w));
    out_[w] = word;
    addr_ += 4;
  }

  void put(Mnemonic m, unsigned rd, unsigned rs1, unsigned rs2, std::int64_t imm) {
    if (imm < INT32_MIN || imm > INT32_MAX) {
      throw Error(ErrorKind::ImmediateOutOfRange, "immediate " + std::to_string(imm) + " out of range");
    }
    put(isa::make(m, rd, rs1, rs2, static_cast<std::int32_t>(imm)).raw);
  }

  unsigned reg(const std::string& s) const {
    const int r = parse_register(trim(s));
    if (r < 0) throw parse_error(st_->line, "expected register, got '" + s + "'");
    return static_cast<unsigned>(r);
  }

  std::int64_t value(const std::string& s) const { return eval(s, syms_, st_->line); }

  // Branch/jump target: a bare number is a pc-relative offset, anything else
  // is an absolute address expression.
  std::int64_t offset(const std::string& s) const {
    const std::string t = trim(s);
    const bool literal = !t.empty() && (std::isdigit(static_cast<unsigned char>(t[0])) ||
                                        ((t[0] == '-' || t[0] == '+') && t.size() > 1 &&
                                         std::isdigit(static_cast<unsigned char>(t[1]))));
    if (literal) return value(t);
    return value(t) - static_cast<std::int64_t>(addr_);
  }

  // "imm(reg)" or "(reg)".
  std::pair<std::int64_t, unsigned> mem_operand(const std::string& s) const {
    const auto open = s.rfind('(');
    const auto close = s.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
      throw parse_error(st_->line, "expected offset(register), got '" + s + "'");
    }
    const std::string off = trim(s.substr(0, open));
    const unsigned base = reg(s.substr(open + 1, close - open - 1));
    return {off.empty() ? 0 : value(off), base};
  }

  void arity(std::size_t n) const { check_arity(*st_, n); }

  void encode_statement(const Statement& st) {
    const std::string& op = st.op;
    const auto& a = st.args;
    if (op == ".word") {
      for (const auto& v : a) {
        const auto x = value(v);
        if (x < INT32_MIN || x > 0xffffffffll) throw Error(ErrorKind::ImmediateOutOfRange, ".word value out of range");
        put(static_cast<std::uint32_t>(x));
      }
      return;
    }
    if (op == ".zero-words") {
      for (unsigned i = 0; i < st.words; ++i) put(0);
      return;
    }
    if (pseudo(op, a)) return;
    const auto m = isa::mnemonic_from_name(op);
    if (!m) {
      if (op == "ecall") return put(0x00000073u);
      if (op == "fence") return put(0x0ff0000fu);
      throw parse_error(st.line, "unknown instruction '" + op + "'");
    }
    const isa::DecodedInstruction proto{*m, isa::format_of(*m)};
    switch (proto.format) {
      case isa::Format::R:
        arity(3);
        return put(*m, reg(a[0]), reg(a[1]), reg(a[2]), 0);
      case isa::Format::I:
        if (*m == Mnemonic::EBREAK) {
          arity(0);
          return put(isa::kEbreak);
        }
        if (proto.is_load()) {
          arity(2);
          auto [off, base] = mem_operand(a[1]);
          return put(*m, reg(a[0]), base, 0, off);
        }
        if (*m == Mnemonic::JALR) {
          if (a.size() == 1) return put(*m, 1, reg(a[0]), 0, 0);
          if (a.size() == 2) {
            auto [off, base] = mem_operand(a[1]);
            return put(*m, reg(a[0]), base, 0, off);
          }
          arity(3);
          return put(*m, reg(a[0]), reg(a[1]), 0, value(a[2]));
        }
        arity(3);
        return put(*m, reg(a[0]), reg(a[1]), 0, value(a[2]));
      case isa::Format::S: {
        arity(2);
        auto [off, base] = mem_operand(a[1]);
        return put(*m, 0, base, reg(a[0]), off);
      }
      case isa::Format::B:
        arity(3);
        return put(*m, 0, reg(a[0]), reg(a[1]), offset(a[2]));
      case isa::Format::U: {
        arity(2);
        const auto v = value(a[1]);
        if (v < 0 || v > 0xfffff) throw Error(ErrorKind::ImmediateOutOfRange, "20-bit upper immediate out of range");
        return put(*m, reg(a[0]), 0, 0, static_cast<std::int64_t>(static_cast<std::int32_t>(static_cast<std::uint32_t>(v) << 12)));
      }
      case isa::Format::J:
        if (a.size() == 1) return put(*m, 1, 0, 0, offset(a[0]));
        arity(2);
        return put(*m, reg(a[0]), 0, 0, offset(a[1]));
    }
  }

  void load_immediate(unsigned rd, std::int64_t v, unsigned words) {
    if (v < INT32_MIN || v > 0xffffffffll) throw Error(ErrorKind::ImmediateOutOfRange, "li value out of 32-bit range");
    const auto u = static_cast<std::uint32_t>(v);
    const auto s = static_cast<std::int32_t>(u);
    const std::uint32_t hi = ((u + 0x800u) >> 12) & 0xfffffu;
    const std::int32_t lo = static_cast<std::int32_t>(u << 20) >> 20;
    if (words == 1) {
      if (fits12(s)) return put(Mnemonic::ADDI, rd, 0, 0, s);
      return put(Mnemonic::LUI, rd, 0, 0, static_cast<std::int32_t>(hi << 12));
    }
    put(Mnemonic::LUI, rd, 0, 0, static_cast<std::int32_t>(hi << 12));
    put(Mnemonic::ADDI, rd, rd, 0, lo);
  }

  bool pseudo(const std::string& op, const std::vector<std::string>& a) {
    if (op == "nop") { arity(0); put(Mnemonic::ADDI, 0, 0, 0, 0); return true; }
    if (op == "li") { arity(2); load_immediate(reg(a[0]), value(a[1]), st_->words); return true; }
    if (op == "la") { arity(2); load_immediate(reg(a[0]), value(a[1]), 2); return true; }
    if (op == "mv") { arity(2); put(Mnemonic::ADDI, reg(a[0]), reg(a[1]), 0, 0); return true; }
    if (op == "not") { arity(2); put(Mnemonic::XORI, reg(a[0]), reg(a[1]), 0, -1); return true; }
    if (op == "neg") { arity(2); put(Mnemonic::SUB, reg(a[0]), 0, reg(a[1]), 0); return true; }
    if (op == "seqz") { arity(2); put(Mnemonic::SLTIU, reg(a[0]), reg(a[1]), 0, 1); return true; }
    if (op == "snez") { arity(2); put(Mnemonic::SLTU, reg(a[0]), 0, reg(a[1]), 0); return true; }
    if (op == "j") { arity(1); put(Mnemonic::JAL, 0, 0, 0, offset(a[0])); return true; }
    if (op == "call") { arity(1); put(Mnemonic::JAL, 1, 0, 0, offset(a[0])); return true; }
    if (op == "jr") { arity(1); put(Mnemonic::JALR, 0, reg(a[0]), 0, 0); return true; }
    if (op == "ret") { arity(0); put(Mnemonic::JALR, 0, 1, 0, 0); return true; }
    if (op == "beqz") { arity(2); put(Mnemonic::BEQ, 0, reg(a[0]), 0, offset(a[1])); return true; }
    if (op == "bnez") { arity(2); put(Mnemonic::BNE, 0, reg(a[0]), 0, offset(a[1])); return true; }
    if (op == "bltz") { arity(2); put(Mnemonic::BLT, 0, reg(a[0]), 0, offset(a[1])); return true; }
    if (op == "bgez") { arity(2); put(Mnemonic::BGE, 0, reg(a[0]), 0, offset(a[1])); return true; }
    if (op == "blez") { arity(2); put(Mnemonic::BGE, 0, 0, reg(a[0]), offset(a[1])); return true; }
    if (op == "bgtz") { arity(2); put(Mnemonic::BLT, 0, 0, reg(a[0]), offset(a[1])); return true; }
    if (op == "bgt") { arity(3); put(Mnemonic::BLT, 0, reg(a[1]), reg(a[0]), offset(a[2])); return true; }
    if (op == "ble") { arity(3); put(Mnemonic::BGE, 0, reg(a[1]), reg(a[0]), offset(a[2])); return true; }
    if (op == "bgtu") { arity(3); put(Mnemonic::BLTU, 0, reg(a[1]), reg(a[0]), offset(a[2])); return true; }
    if (op == "bleu") { arity(3); put(Mnemonic::BGEU, 0, reg(a[1]), reg(a[0]), offset(a[2])); return true; }
    return false;
  }

  const Symbols& syms_;
  std::map<std::uint32_t, std::uint32_t>& out_;
  const Statement* st_ = nullptr;
  std::uint32_t addr_ = 0;
};

}  // namespace

std::map<std::string, std::uint32_t> collect_labels(const AssemblySource& source) {
  return first_pass(source).labels;
}

AssembledProgram assemble(const AssemblySource& source) {
  FirstPass fp = first_pass(source);
  AssembledProgram out;
  Encoder enc(fp.symbols, out.image.words);
  for (const auto& st : fp.statements) enc.emit(st);
  out.labels = std::move(fp.labels);
  if (auto it = out.labels.find("_start"); it != out.labels.end()) out.image.entry = it->second;
  return out;
}

AssembledProgram assemble(std::string_view text) { return assemble(AssemblySource::from_text(text)); }

}  // namespace rvdse::assembler
