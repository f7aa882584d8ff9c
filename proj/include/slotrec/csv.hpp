#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace slotrec {

/// Error raised on malformed input files or invalid domain data.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace csv {

/// Split one CSV line on commas. No quoting: none of our formats needs it.
inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

struct Row {
  std::size_t line_no = 0;  // 1-based, header included
  std::vector<std::string> fields;
};

/// Read a CSV file, check the header matches exactly, return data rows.
inline std::vector<Row> read_file(const std::string& path, const std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw InputError(path + ": empty file");
  ++line_no;
  auto head = split(line);
  if (head != header) {
    std::string want;
    for (std::size_t i = 0; i < header.size(); ++i) want += (i ? "," : "") + header[i];
    throw InputError(path + ":1: expected header '" + want + "', got '" + line + "'");
  }
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    rows.push_back(Row{line_no, split(line)});
  }
  return rows;
}

inline long parse_long(const std::string& s, const std::string& path, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError(path + ":" + std::to_string(line_no) + ": not an integer: '" + s + "'");
  }
}

inline double parse_double(const std::string& s, const std::string& path, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError(path + ":" + std::to_string(line_no) + ": not a number: '" + s + "'");
  }
}

/// Fixed formatting for floats in CSV output; identical bits give identical text.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace csv

/// Parse "HH:MM" (24-hour) into minutes since midnight.
inline int parse_hhmm(const std::string& s, const std::string& context) {
  if (s.size() != 5 || s[2] != ':' || !isdigit(s[0]) || !isdigit(s[1]) || !isdigit(s[3]) ||
      !isdigit(s[4])) {
    throw InputError(context + ": bad time '" + s + "' (expected HH:MM)");
  }
  int h = (s[0] - '0') * 10 + (s[1] - '0');
  int m = (s[3] - '0') * 10 + (s[4] - '0');
  if (h > 23 || m > 59) throw InputError(context + ": bad time '" + s + "'");
  return h * 60 + m;
}

inline std::string format_hhmm(int minutes) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02d:%02d", (minutes / 60) % 24, minutes % 60);
  return buf;
}

/// FNV-1a 64-bit digest of a file, as fixed-width hex. Used in run manifests.
inline std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char out[20];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace slotrec
