#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "hom/core.hpp"

namespace hom {

// Time tags split per detector; each channel is sorted ascending.
class TagStream {
 public:
  TagStream() = default;
  // Sorts each channel. Throws ConfigError on negative times.
  explicit TagStream(std::span<TimeTag const> tags);
  explicit TagStream(std::array<std::vector<Picoseconds>, kNumChannels> channels);

  std::span<Picoseconds const> channel(Channel c) const { return channels_[index_of(c)]; }
  std::size_t size(Channel c) const { return channels_[index_of(c)].size(); }
  std::size_t total() const;

  // Merged view sorted by (time, channel).
  std::vector<TimeTag> merged() const;

  // Adds a constant to every tag (time-invariance checks).
  TagStream shifted(Picoseconds offset) const;

  // Tags with begin <= time < end.
  TagStream between(Picoseconds begin, Picoseconds end) const;

  friend bool operator==(TagStream const&, TagStream const&) = default;

 private:
  void check_and_sort();

  std::array<std::vector<Picoseconds>, kNumChannels> channels_;
};

// CSV `channel,time_ps`, sorted by time, LF endings, channels as D1..D4.
void write_tags_csv(std::ostream& os, TagStream const& tags);
void write_tags_csv(std::filesystem::path const& path, TagStream const& tags);
TagStream read_tags_csv(std::istream& is);
TagStream read_tags_csv(std::filesystem::path const& path);

}  // namespace hom
