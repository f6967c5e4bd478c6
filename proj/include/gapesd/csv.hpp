#pragma once

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace gapesd::csv {

/// Shortest decimal text that parses back to the same double.
inline std::string format(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string format(const std::optional<double>& x) { return x ? format(*x) : std::string(); }

/// Accumulates LF-terminated comma-separated lines.
class Writer {
 public:
  void comment(std::string_view key, std::string_view value) {
    text_ += "# ";
    text_ += key;
    text_ += '=';
    text_ += value;
    text_ += '\n';
  }

  template <class... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    (append(fields, first), ...);
    text_ += '\n';
  }

  void header(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) text_ += ',';
      text_ += names[i];
    }
    text_ += '\n';
  }

  const std::string& str() const { return text_; }

 private:
  void sep(bool& first) {
    if (!first) text_ += ',';
    first = false;
  }
  void append(double x, bool& first) {
    sep(first);
    text_ += format(x);
  }
  void append(const std::optional<double>& x, bool& first) {
    sep(first);
    text_ += format(x);
  }
  void append(std::string_view s, bool& first) {
    sep(first);
    text_ += s;
  }
  void append(const std::string& s, bool& first) { append(std::string_view(s), first); }
  void append(const char* s, bool& first) { append(std::string_view(s), first); }
  void append(int x, bool& first) {
    sep(first);
    text_ += std::to_string(x);
  }

  std::string text_;
};

/// Writes `text` to `path` via a sibling temporary file and rename, so readers never
/// observe a partially written file.
inline void write_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::system_error(errno, std::generic_category(), "cannot open " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw std::system_error(errno, std::generic_category(), "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::system_error(ec, "cannot rename to " + path.string());
  }
}

}  // namespace gapesd::csv
