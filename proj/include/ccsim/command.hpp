#pragma once

#include <cstdint>
#include <cstdio>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "ccsim/errors.hpp"
#include "ccsim/geometry.hpp"
#include "ccsim/timing.hpp"

namespace ccsim {

enum class CommandKind : std::uint8_t { Act, Pre, Rd, Wr, Ref };

inline const char* to_string(CommandKind k) {
  switch (k) {
    case CommandKind::Act: return "ACT";
    case CommandKind::Pre: return "PRE";
    case CommandKind::Rd: return "RD";
    case CommandKind::Wr: return "WR";
    case CommandKind::Ref: return "REF";
  }
  return "?";
}

// One command on a channel's command bus. timing_class is meaningful for ACT
// only; row is unused for REF, column is used only by RD/WR.
struct DramCommand {
  CommandKind kind = CommandKind::Act;
  DramCoord coord;
  Cycle issue_time = 0;
  TimingClass timing_class = TimingClass::Standard;
};

// Command-trace line format (whitespace separated, one command per line):
//   <cycle> <kind> <channel> <rank> <bank> <row|-> <col|-> <S|R>
inline std::string format_command(const DramCommand& c) {
  char row[16];
  char col[16];
  bool has_row = c.kind != CommandKind::Ref;
  bool has_col = c.kind == CommandKind::Rd || c.kind == CommandKind::Wr;
  if (has_row) std::snprintf(row, sizeof row, "%u", c.coord.row); else { row[0] = '-'; row[1] = 0; }
  if (has_col) std::snprintf(col, sizeof col, "%u", c.coord.column); else { col[0] = '-'; col[1] = 0; }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%lld %s %u %u %u %s %s %s",
                static_cast<long long>(c.issue_time), to_string(c.kind), c.coord.channel,
                c.coord.rank, c.coord.bank, row, col, to_string(c.timing_class));
  return buf;
}

inline std::vector<DramCommand> parse_command_trace(std::istream& in,
                                                    const std::string& source = "<stream>") {
  std::vector<DramCommand> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream ls(line);
    long long cycle;
    std::string kind, ch, rk, bk, row, col, cls;
    if (!(ls >> cycle >> kind >> ch >> rk >> bk >> row >> col >> cls))
      throw ParseError(source, lineno, "expected '<cycle> <kind> <ch> <rank> <bank> <row|-> <col|-> <S|R>'");
    DramCommand c;
    c.issue_time = cycle;
    if (kind == "ACT") c.kind = CommandKind::Act;
    else if (kind == "PRE") c.kind = CommandKind::Pre;
    else if (kind == "RD") c.kind = CommandKind::Rd;
    else if (kind == "WR") c.kind = CommandKind::Wr;
    else if (kind == "REF") c.kind = CommandKind::Ref;
    else throw ParseError(source, lineno, "unknown command kind '" + kind + "'");
    auto to_u32 = [&](const std::string& s, const char* what) {
      try {
        std::size_t pos = 0;
        unsigned long v = std::stoul(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return static_cast<std::uint32_t>(v);
      } catch (const std::exception&) {
        throw ParseError(source, lineno, std::string("bad ") + what + " field '" + s + "'");
      }
    };
    c.coord.channel = to_u32(ch, "channel");
    c.coord.rank = to_u32(rk, "rank");
    c.coord.bank = to_u32(bk, "bank");
    c.coord.row = row == "-" ? 0 : to_u32(row, "row");
    c.coord.column = col == "-" ? 0 : to_u32(col, "column");
    if (cls == "S") c.timing_class = TimingClass::Standard;
    else if (cls == "R") c.timing_class = TimingClass::Reduced;
    else throw ParseError(source, lineno, "bad timing class '" + cls + "' (expected S or R)");
    out.push_back(c);
  }
  return out;
}

}  // namespace ccsim
