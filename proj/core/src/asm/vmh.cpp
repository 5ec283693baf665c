#include "rvdse/asm/vmh.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rvdse/error.hpp"

namespace rvdse::assembler {

std::string emit_vmh(const MemoryImage& image) {
  std::string out;
  char buf[16];
  std::optional<std::uint32_t> next;
  for (const auto& [addr, word] : image.words) {
    if (!next || *next != addr) {
      std::snprintf(buf, sizeof buf, "@%x\n", addr);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, "%08x\n", word);
    out += buf;
    next = addr + 1;
  }
  return out;
}

namespace {

bool all_hex(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isxdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::uint64_t hex_value(std::string_view s) {
  std::uint64_t v = 0;
  for (char c : s) {
    v = (v << 4) | static_cast<std::uint64_t>(std::isdigit(static_cast<unsigned char>(c))
                                                  ? c - '0'
                                                  : std::tolower(static_cast<unsigned char>(c)) - 'a' + 10);
  }
  return v;
}

}  // namespace

MemoryImage parse_vmh(std::string_view text, std::optional<std::uint64_t> limit_words) {
  constexpr std::uint64_t kAddressSpaceWords = 1ull << 30;
  const std::uint64_t limit = limit_words.value_or(kAddressSpaceWords);
  MemoryImage image;
  std::uint64_t addr = 0;
  int line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (text.substr(i, 2) == "//") {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (text.substr(i, 2) == "/*") {
      const auto end = text.find("*/", i + 2);
      if (end == std::string_view::npos) {
        throw Error(ErrorKind::MalformedToken, "unterminated block comment").at_line(line);
      }
      for (std::size_t k = i; k < end; ++k) line += text[k] == '\n';
      i = end + 2;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
           text.substr(j, 2) != "//" && text.substr(j, 2) != "/*") {
      ++j;
    }
    const std::string_view tok = text.substr(i, j - i);
    i = j;
    if (tok[0] == '@') {
      const auto digits = tok.substr(1);
      if (!all_hex(digits) || digits.size() > 16) {
        throw Error(ErrorKind::MalformedToken, "bad address record '" + std::string(tok) + "'").at_line(line);
      }
      addr = hex_value(digits);
      if (digits.size() > 8 || addr >= limit) {
        throw Error(ErrorKind::AddressOverflow, "address record '" + std::string(tok) + "' out of range").at_line(line);
      }
      continue;
    }
    if (!all_hex(tok) || tok.size() > 8) {
      throw Error(ErrorKind::MalformedToken, "bad word token '" + std::string(tok) + "'").at_line(line);
    }
    if (addr >= limit) {
      throw Error(ErrorKind::AddressOverflow, "word beyond addressable range").at_line(line);
    }
    image.words[static_cast<std::uint32_t>(addr)] = static_cast<std::uint32_t>(hex_value(tok));
    ++addr;
  }
  return image;
}

MemoryImage read_vmh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidConfig, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_vmh(ss.str());
}

void write_vmh_file(const std::string& path, const MemoryImage& image) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidConfig, "cannot write '" + path + "'");
  out << emit_vmh(image);
}

}  // namespace rvdse::assembler
