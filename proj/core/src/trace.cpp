#include "iooracle/trace.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "iooracle/error.hpp"

namespace iooracle {

namespace {

constexpr std::array<std::string_view, 12> kTagNames = {
    "mm", "spmm", "trsm", "lu", "chol", "ldlt", "qr", "minplus", "pow", "mmm", "frob", "aux"};

void put_operand(std::ostream& out, Operand op) {
  out << (op.is_scratch() ? '#' : '@') << op.index();
}

Operand parse_operand(std::string_view tok, std::size_t line) {
  if (tok.size() < 2 || (tok[0] != '@' && tok[0] != '#')) {
    throw Error(Errc::parse_error, "line " + std::to_string(line) + ": bad operand '" +
                                       std::string(tok) + "'");
  }
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(tok.data() + 1, tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) {
    throw Error(Errc::parse_error, "line " + std::to_string(line) + ": bad operand '" +
                                       std::string(tok) + "'");
  }
  return tok[0] == '#' ? Operand::scratch(v) : Operand::slow(v);
}

}  // namespace

std::string_view to_string(KernelTag tag) noexcept {
  return kTagNames[static_cast<std::size_t>(tag)];
}

std::optional<KernelTag> parse_kernel_tag(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kTagNames.size(); ++i) {
    if (kTagNames[i] == s) return static_cast<KernelTag>(i);
  }
  return std::nullopt;
}

void write_trace(std::ostream& out, const Trace& trace) {
  for (const TraceEvent& e : trace) {
    switch (e.kind) {
      case EventKind::read: out << "R " << e.base << ' ' << e.len << '\n'; break;
      case EventKind::write: out << "W " << e.base << ' ' << e.len << '\n'; break;
      case EventKind::evict: out << "E " << e.base << ' ' << e.len << '\n'; break;
      case EventKind::claim: out << "N " << e.base << ' ' << e.len << '\n'; break;
      case EventKind::alloc: out << "A " << e.base << ' ' << e.len << '\n'; break;
      case EventKind::release: out << "X " << e.base << ' ' << e.len << '\n'; break;
      case EventKind::imposed_read:
        out << "IR ";
        put_operand(out, e.output);
        out << '\n';
        break;
      case EventKind::imposed_write:
        out << "IW ";
        put_operand(out, e.output);
        out << '\n';
        break;
      case EventKind::flop:
        out << "F " << to_string(e.label.tag) << ' ' << e.label.i << ' ' << e.label.j << ' '
            << e.label.k << ' ' << (e.g_op ? 1 : 0) << " :";
        for (std::size_t i = 0; i < e.input_count; ++i) {
          out << ' ';
          put_operand(out, e.inputs[i]);
        }
        out << " > ";
        put_operand(out, e.output);
        out << '\n';
        break;
    }
  }
}

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    TraceEvent e;
    auto fail = [&](const char* why) {
      return Error(Errc::parse_error, "line " + std::to_string(lineno) + ": " + why);
    };
    if (kind == "R" || kind == "W" || kind == "E" || kind == "N" || kind == "A" || kind == "X") {
      if (!(ls >> e.base >> e.len)) throw fail("expected two integers");
      e.kind = kind == "R"   ? EventKind::read
               : kind == "W" ? EventKind::write
               : kind == "E" ? EventKind::evict
               : kind == "N" ? EventKind::claim
               : kind == "A" ? EventKind::alloc
                             : EventKind::release;
    } else if (kind == "IR" || kind == "IW") {
      std::string tok;
      if (!(ls >> tok)) throw fail("expected an operand");
      e.kind = kind == "IR" ? EventKind::imposed_read : EventKind::imposed_write;
      e.output = parse_operand(tok, lineno);
    } else if (kind == "F") {
      std::string tag;
      int g = 0;
      if (!(ls >> tag >> e.label.i >> e.label.j >> e.label.k >> g)) {
        throw fail("expected 'F tag i j k g'");
      }
      auto parsed = parse_kernel_tag(tag);
      if (!parsed) throw fail("unknown kernel tag");
      e.kind = EventKind::flop;
      e.label.tag = *parsed;
      e.g_op = g != 0;
      std::string tok;
      if (ls >> tok) {
        if (tok != ":") throw fail("expected ':' before operands");
        bool have_output = false;
        while (ls >> tok) {
          if (tok == ">") {
            if (!(ls >> tok)) throw fail("missing output operand");
            e.output = parse_operand(tok, lineno);
            have_output = true;
            break;
          }
          if (e.input_count == TraceEvent::kMaxInputs) throw fail("too many inputs");
          e.inputs[e.input_count++] = parse_operand(tok, lineno);
        }
        if (!have_output) throw fail("missing '>' output");
      }
    } else {
      throw fail("unknown record kind");
    }
    trace.push_back(e);
  }
  return trace;
}

}  // namespace iooracle
