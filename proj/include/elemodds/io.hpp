#pragma once

// CSV plumbing shared by the experiment, fit and CLI layers.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace elemodds {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);
std::string format_number(std::int64_t value);

/// Strict numeric parsing of one CSV field; std::nullopt on any garbage.
std::optional<double> parse_double(std::string_view text);
std::optional<std::int64_t> parse_integer(std::string_view text);

std::vector<std::string_view> split_fields(std::string_view line);

/// `# key=value` comment lines collected while reading a CSV.
using CommentMeta = std::map<std::string, std::string, std::less<>>;

/// Parses a `# key=value` line into meta; returns false for non-comment lines.
bool parse_comment(std::string_view line, CommentMeta& meta);

void write_comment(std::ostream& out, std::string_view key, std::string_view value);

/// Provenance block written at the top of every output file.
struct RunManifest {
  std::string command;
  std::string invocation;  // canonical command line with every resolved flag
  std::optional<std::uint64_t> seed;
  std::string version;
  std::optional<std::string> timestamp;

  void write(std::ostream& out) const;
};

}  // namespace elemodds
