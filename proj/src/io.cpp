#include "poicalib/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "poicalib/error.hpp"

namespace poicalib {

std::string format_double(double value) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, p);
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

void write_canonical(std::ostream& out, const InteractionLog& log) {
  for (const auto& x : log.interactions())
    out << x.user_id << '\t' << x.item_id << '\t' << x.timestamp << '\t' << format_fixed(x.lat, 8)
        << '\t' << format_fixed(x.lon, 8) << '\n';
}

ParseResult read_log(const std::filesystem::path& path, InputFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("", "cannot open " + path.string());
  return parse_checkins(in, format);
}

void write_scored_lists(std::ostream& out, std::span<const ScoredList> lists, bool with_origin) {
  for (const auto& list : lists)
    for (std::size_t r = 0; r < list.entries.size(); ++r) {
      out << list.user_id << '\t' << list.entries[r].item_id << '\t' << (r + 1) << '\t'
          << format_double(list.entries[r].score);
      if (with_origin) out << '\t' << list.origin;
      out << '\n';
    }
}

std::vector<ScoredList> read_scored_lists(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("", "missing recommendation file " + path.string());
  std::vector<ScoredList> lists;
  std::map<std::string, std::size_t> slot;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) f.push_back(field);
    if (f.size() != 4 && f.size() != 5)
      throw data_error("", path.string() + ":" + std::to_string(line_no) + ": expected 4 or 5 fields");
    double score = 0.0;
    auto [p, ec] = std::from_chars(f[3].data(), f[3].data() + f[3].size(), score);
    if (ec != std::errc{})
      throw data_error("", path.string() + ":" + std::to_string(line_no) + ": bad score");
    auto [it, inserted] = slot.try_emplace(f[0], lists.size());
    if (inserted) {
      lists.push_back({f[0], {}, f.size() == 5 ? f[4] : std::string("base")});
    }
    auto& list = lists[it->second];
    const auto rank = static_cast<std::size_t>(std::stoul(f[2]));
    if (rank != list.entries.size() + 1)
      throw data_error("", path.string() + ":" + std::to_string(line_no) + ": ranks out of order");
    list.entries.push_back({f[1], score});
  }
  return lists;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("", "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw data_error("", "cannot write " + path.string());
  out << content;
}

void require_file(const std::filesystem::path& path, const std::string& stage) {
  if (!std::filesystem::exists(path))
    throw data_error(stage, "missing upstream artifact: expected " + path.string());
}

}  // namespace poicalib
