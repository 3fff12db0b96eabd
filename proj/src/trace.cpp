#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "save/env.hpp"
#include "save/error.hpp"

namespace save {

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    auto field = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
      field.remove_suffix(1);
    out.push_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct LineError {
  const std::string& source;
  int line;

  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError(source + ":" + std::to_string(line) + ": " + msg);
  }
};

int parse_int(std::string_view f, const LineError& at, const char* column) {
  int v = 0;
  auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc{} || p != f.data() + f.size())
    at.fail(std::string("column '") + column + "' is not an integer: '" + std::string(f) + "'");
  return v;
}

double parse_double(std::string_view f, const LineError& at, const char* column) {
  // strtod rather than from_chars<double>, which older libstdc++ lacks.
  std::string s(f);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
    at.fail(std::string("column '") + column + "' is not a finite number: '" + s + "'");
  return v;
}

}  // namespace

Trace parse_trace(std::istream& in, const std::string& source) {
  std::string line;
  int lineno = 0;
  Trace trace;

  // Header.
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line != "\r") break;
  }
  if (lineno == 0 || line.empty()) throw InputError(source + ": missing header");
  const auto header = split_csv(line);
  int col_slot = -1, col_server = -1, col_g1 = -1, col_g2 = -1, col_avail = -1;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    const auto h = header[i];
    if (h == "slot") col_slot = i;
    else if (h == "server") col_server = i;
    else if (h == "gamma1") col_g1 = i;
    else if (h == "gamma2") col_g2 = i;
    else if (h == "available") col_avail = i;
    else LineError{source, lineno}.fail("unknown column '" + std::string(h) + "'");
  }
  for (auto [col, name] : {std::pair{col_slot, "slot"}, {col_server, "server"}, {col_g1, "gamma1"},
                           {col_g2, "gamma2"}})
    if (col < 0) LineError{source, lineno}.fail(std::string("missing column '") + name + "'");
  const std::size_t ncols = header.size();

  struct Pending {
    int slot = 0;
    std::vector<double> g1, g2;
    std::vector<int> avail;
    std::vector<char> seen;
    int count = 0;
    int last_line = 0;
  } cur;

  auto flush = [&]() {
    if (cur.slot == 0) return;
    const LineError at{source, cur.last_line};
    if (trace.num_servers == 0) {
      trace.num_servers = static_cast<int>(cur.seen.size());
      if (trace.num_servers > kMaxServers) at.fail("more than 32 servers");
    }
    if (static_cast<int>(cur.seen.size()) != trace.num_servers || cur.count != trace.num_servers)
      at.fail("slot " + std::to_string(cur.slot) + " does not list servers 1.." + std::to_string(trace.num_servers) +
              " exactly once");
    TraceSlot ts;
    ts.sample.slot = cur.slot;
    ts.sample.gamma1 = cur.g1;
    ts.sample.gamma2 = cur.g2;
    if (col_avail >= 0) {
      ServerSet m;
      for (int k = 0; k < trace.num_servers; ++k)
        if (cur.avail[k]) m.insert(k);
      if (m.empty()) at.fail("slot " + std::to_string(cur.slot) + " has no available server");
      ts.mask = m;
    }
    trace.slots.push_back(std::move(ts));
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const LineError at{source, lineno};
    const auto f = split_csv(line);
    if (f.size() != ncols)
      at.fail("expected " + std::to_string(ncols) + " fields, found " + std::to_string(f.size()));

    const int slot = parse_int(f[col_slot], at, "slot");
    const int server = parse_int(f[col_server], at, "server");
    const double g1 = parse_double(f[col_g1], at, "gamma1");
    const double g2 = parse_double(f[col_g2], at, "gamma2");
    if (g1 < 0.0) at.fail("column 'gamma1' must be >= 0, got " + std::string(f[col_g1]));
    if (g2 < 0.0) at.fail("column 'gamma2' must be >= 0, got " + std::string(f[col_g2]));
    int avail = 1;
    if (col_avail >= 0) {
      avail = parse_int(f[col_avail], at, "available");
      if (avail != 0 && avail != 1) at.fail("column 'available' must be 0 or 1");
    }
    if (server < 1 || server > kMaxServers) at.fail("column 'server' out of range");
    if (trace.num_servers > 0 && server > trace.num_servers)
      at.fail("server " + std::to_string(server) + " exceeds K=" + std::to_string(trace.num_servers));

    if (slot != cur.slot) {
      const int expected = cur.slot + 1;
      if (slot != expected)
        at.fail("slots must be contiguous from 1; expected slot " + std::to_string(expected) + ", got " +
                std::to_string(slot));
      flush();
      cur = Pending{};
      cur.slot = slot;
    }
    const auto idx = static_cast<std::size_t>(server - 1);
    if (cur.seen.size() <= idx) {
      cur.seen.resize(idx + 1, 0);
      cur.g1.resize(idx + 1, 0.0);
      cur.g2.resize(idx + 1, 0.0);
      cur.avail.resize(idx + 1, 0);
    }
    if (cur.seen[idx]) at.fail("server " + std::to_string(server) + " repeated in slot " + std::to_string(slot));
    cur.seen[idx] = 1;
    cur.g1[idx] = g1;
    cur.g2[idx] = g2;
    cur.avail[idx] = avail;
    ++cur.count;
    cur.last_line = lineno;
  }
  flush();
  return trace;
}

Trace ingest_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open trace file '" + path + "'");
  return parse_trace(in, path);
}

}  // namespace save
