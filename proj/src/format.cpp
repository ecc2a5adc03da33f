#include "likeability/format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <system_error>

namespace likeability {

std::string format_double(double value) {
  if (value == 0.0) return std::signbit(value) ? "-0" : "0";
  std::array<char, 64> buffer{};
  auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(),
                                 value);
  return std::string(buffer.data(), end);
}

bool parse_double(const std::string& text, double& out) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && (text[begin] == ' ' || text[begin] == '\t')) ++begin;
  while (end > begin && (text[end - 1] == ' ' || text[end - 1] == '\t' ||
                         text[end - 1] == '\r')) {
    --end;
  }
  if (begin == end) return false;
  const char* first = text.data() + begin;
  const char* last = text.data() + end;
  // from_chars rejects a leading '+', which spreadsheets sometimes emit.
  if (*first == '+') ++first;
  double parsed = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, parsed);
  if (ec != std::errc{} || ptr != last || !std::isfinite(parsed)) return false;
  out = parsed;
  return true;
}

}  // namespace likeability
