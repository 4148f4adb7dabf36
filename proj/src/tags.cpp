#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "hom/io.hpp"
#include "hom/tags.hpp"

namespace hom {

TagStream::TagStream(std::span<TimeTag const> tags) {
  for (auto const& t : tags) channels_[index_of(t.channel)].push_back(t.time);
  check_and_sort();
}

TagStream::TagStream(std::array<std::vector<Picoseconds>, kNumChannels> channels)
    : channels_(std::move(channels)) {
  check_and_sort();
}

void TagStream::check_and_sort() {
  for (auto& ch : channels_) {
    if (!std::is_sorted(ch.begin(), ch.end())) std::sort(ch.begin(), ch.end());
    if (!ch.empty() && ch.front() < 0) {
      throw ConfigError("time tags must be >= 0 (found " + std::to_string(ch.front()) + ")");
    }
  }
}

std::size_t TagStream::total() const {
  std::size_t n = 0;
  for (auto const& ch : channels_) n += ch.size();
  return n;
}

std::vector<TimeTag> TagStream::merged() const {
  std::vector<TimeTag> out;
  out.reserve(total());
  std::array<std::size_t, kNumChannels> pos{};
  while (true) {
    std::size_t best = kNumChannels;
    for (std::size_t c = 0; c < kNumChannels; ++c) {
      if (pos[c] == channels_[c].size()) continue;
      if (best == kNumChannels || channels_[c][pos[c]] < channels_[best][pos[best]]) best = c;
    }
    if (best == kNumChannels) break;
    out.push_back({static_cast<Channel>(best), channels_[best][pos[best]++]});
  }
  return out;
}

TagStream TagStream::shifted(Picoseconds offset) const {
  auto ch = channels_;
  for (auto& v : ch) {
    for (auto& t : v) t += offset;
  }
  return TagStream(std::move(ch));
}

TagStream TagStream::between(Picoseconds begin, Picoseconds end) const {
  std::array<std::vector<Picoseconds>, kNumChannels> ch;
  for (std::size_t c = 0; c < kNumChannels; ++c) {
    auto const& v = channels_[c];
    auto const lo = std::lower_bound(v.begin(), v.end(), begin);
    auto const hi = std::lower_bound(lo, v.end(), std::max(begin, end));
    ch[c].assign(lo, hi);
  }
  return TagStream(std::move(ch));
}

void write_tags_csv(std::ostream& os, TagStream const& tags) {
  os << "channel,time_ps\n";
  for (auto const& t : tags.merged()) os << to_string(t.channel) << ',' << t.time << '\n';
}

void write_tags_csv(std::filesystem::path const& path, TagStream const& tags) {
  std::ostringstream ss;
  write_tags_csv(ss, tags);
  write_file_atomic(path, ss.str());
}

TagStream read_tags_csv(std::istream& is) {
  std::string line;
  auto next = [&] {
    if (!std::getline(is, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next() || line != "channel,time_ps") {
    throw ConfigError("tag CSV: missing header 'channel,time_ps'");
  }
  std::array<std::vector<Picoseconds>, kNumChannels> ch;
  std::size_t row = 1;
  Picoseconds last = 0;
  while (next()) {
    ++row;
    if (line.empty()) continue;
    auto const comma = line.find(',');
    if (comma == std::string::npos) {
      throw ConfigError("tag CSV row " + std::to_string(row) + ": expected two fields");
    }
    Channel const c = parse_channel(std::string_view(line).substr(0, comma));
    Picoseconds t = 0;
    auto const* b = line.data();
    auto const r = std::from_chars(b + comma + 1, b + line.size(), t);
    if (r.ec != std::errc{} || r.ptr != b + line.size()) {
      throw ConfigError("tag CSV row " + std::to_string(row) + ": malformed time '" + line + "'");
    }
    if (t < last) {
      throw ConfigError("tag CSV row " + std::to_string(row) + ": rows not sorted by time");
    }
    last = t;
    ch[index_of(c)].push_back(t);
  }
  return TagStream(std::move(ch));
}

TagStream read_tags_csv(std::filesystem::path const& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_tags_csv(in);
}

}  // namespace hom
