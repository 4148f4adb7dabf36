#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hom/core.hpp"
#include "hom/io.hpp"

namespace hom {

std::string_view to_string(Channel c) {
  static constexpr std::array<std::string_view, kNumChannels> names{"D1", "D2", "D3", "D4"};
  return names[index_of(c)];
}

Channel parse_channel(std::string_view text) {
  if (text.size() == 2 && (text[0] == 'D' || text[0] == 'd')) text.remove_prefix(1);
  if (text.size() == 1 && text[0] >= '1' && text[0] <= '4') {
    return static_cast<Channel>(text[0] - '1');
  }
  throw ConfigError("unknown detector channel '" + std::string(text) + "' (expected D1..D4)");
}

void WindowConfig::validate() const {
  if (width <= 0) throw ConfigError("windows.width must be > 0");
  auto const sep = x_center > y_center ? x_center - y_center : y_center - x_center;
  if (sep < width) {
    throw ConfigError("windows x and y overlap: |x_center - y_center| = " + std::to_string(sep) +
                      " ps < width " + std::to_string(width) + " ps");
  }
  if (t0 == t1) throw ConfigError("windows.t0 and windows.t1 must differ");
}

void write_file_atomic(std::filesystem::path const& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(std::filesystem::path const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double v) {
  char buf[64];
  auto const res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace hom
