#include <array>
#include <cctype>
#include <charconv>
#include <chrono>
#include <optional>
#include <string_view>

#include "poicalib/ingest.hpp"

namespace poicalib {
namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return ec == std::errc{} && p == s.data() + pos + len;
}

std::optional<std::int64_t> to_epoch(int y, int mo, int d, int h, int mi, int sec,
                                     int offset_seconds) {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
  const std::int64_t days = sys_days{ymd}.time_since_epoch().count();
  const std::int64_t t = days * 86400 + h * 3600 + mi * 60 + sec - offset_seconds;
  if (t < 0) return std::nullopt;
  return t;
}

// Parses "Z", "+hh:mm", "+hhmm", "-hh" etc. starting at pos; must consume the rest.
bool read_offset(std::string_view s, std::size_t pos, int& offset) {
  offset = 0;
  if (pos == s.size()) return true;
  if (s[pos] == 'Z' || s[pos] == 'z') return pos + 1 == s.size();
  if (s[pos] != '+' && s[pos] != '-') return false;
  const int sign = s[pos] == '-' ? -1 : 1;
  int hh = 0, mm = 0;
  if (!read_int(s, pos + 1, 2, hh)) return false;
  std::size_t rest = pos + 3;
  if (rest < s.size() && s[rest] == ':') ++rest;
  if (rest < s.size()) {
    if (!read_int(s, rest, 2, mm) || rest + 2 != s.size()) return false;
  }
  offset = sign * (hh * 3600 + mm * 60);
  return true;
}

std::optional<std::int64_t> parse_iso(std::string_view s) {
  int y, mo, d, h = 0, mi = 0, sec = 0;
  if (s.size() < 10 || !read_int(s, 0, 4, y) || s[4] != '-' || !read_int(s, 5, 2, mo) ||
      s[7] != '-' || !read_int(s, 8, 2, d))
    return std::nullopt;
  if (mo < 1 || mo > 12) return std::nullopt;
  std::size_t pos = 10;
  if (pos < s.size() && (s[pos] == 'T' || s[pos] == ' ')) {
    if (!read_int(s, pos + 1, 2, h) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
        !read_int(s, pos + 4, 2, mi))
      return std::nullopt;
    pos += 6;
    if (pos < s.size() && s[pos] == ':') {
      if (!read_int(s, pos + 1, 2, sec)) return std::nullopt;
      pos += 3;
      if (pos < s.size() && s[pos] == '.') {
        ++pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      }
    }
  }
  int offset = 0;
  if (!read_offset(s, pos, offset)) return std::nullopt;
  return to_epoch(y, mo, d, h, mi, sec, offset);
}

// "Tue Apr 03 18:00:09 +0000 2012"
std::optional<std::int64_t> parse_ctime_style(std::string_view s) {
  static constexpr std::array<std::string_view, 12> months = {
      "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  if (s.size() != 30 || s[3] != ' ' || s[7] != ' ' || s[10] != ' ' || s[19] != ' ' ||
      s[25] != ' ')
    return std::nullopt;
  int mo = 0;
  for (std::size_t i = 0; i < months.size(); ++i)
    if (s.substr(4, 3) == months[i]) mo = static_cast<int>(i) + 1;
  int d, h, mi, sec, y;
  if (mo == 0 || !read_int(s, 8, 2, d) || !read_int(s, 11, 2, h) || s[13] != ':' ||
      !read_int(s, 14, 2, mi) || s[16] != ':' || !read_int(s, 17, 2, sec) ||
      !read_int(s, 26, 4, y))
    return std::nullopt;
  int offset = 0;
  std::string_view off = s.substr(20, 5);
  if (!read_offset(off, 0, offset)) return std::nullopt;
  return to_epoch(y, mo, d, h, mi, sec, offset);
}

}  // namespace

std::optional<std::int64_t> parse_timestamp(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  if (text.empty()) return std::nullopt;

  bool all_digits = true;
  for (char c : text)
    if (!std::isdigit(static_cast<unsigned char>(c))) all_digits = false;
  if (all_digits) {
    std::int64_t value = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || p != text.data() + text.size()) return std::nullopt;
    return value;
  }
  if (auto t = parse_iso(text)) return t;
  return parse_ctime_style(text);
}

}  // namespace poicalib
