#include "elemodds/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <ostream>

namespace elemodds {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return {buf.data(), result.ptr};
}

std::string format_number(std::int64_t value) { return std::to_string(value); }

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::optional<std::int64_t> parse_integer(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  std::int64_t value = 0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_comment(std::string_view line, CommentMeta& meta) {
  line = trim(line);
  if (line.empty() || line.front() != '#') return false;
  line.remove_prefix(1);
  line = trim(line);
  const auto eq = line.find('=');
  if (eq != std::string_view::npos) meta.insert_or_assign(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
  return true;
}

void write_comment(std::ostream& out, std::string_view key, std::string_view value) {
  out << "# " << key << '=' << value << '\n';
}

void RunManifest::write(std::ostream& out) const {
  write_comment(out, "manifest.command", command);
  write_comment(out, "manifest.version", version);
  if (seed) write_comment(out, "manifest.seed", std::to_string(*seed));
  if (timestamp) write_comment(out, "manifest.timestamp", *timestamp);
  write_comment(out, "manifest.invocation", invocation);
}

}  // namespace elemodds
