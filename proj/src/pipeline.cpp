#include <algorithm>
#include <cmath>

#include "hom/pipeline.hpp"

namespace hom {
namespace {

constexpr std::array<Stream, kNumChannels> kDetectStreams{Stream::detect_d1, Stream::detect_d2,
                                                          Stream::detect_d3, Stream::detect_d4};

using ChannelTimes = std::array<std::vector<Picoseconds>, kNumChannels>;

// One slice or frame. The leading `forced.size()` entries of `pairs` send
// their herald straight to the given channel; background pairs are added.
struct Interval {
  Picoseconds begin = 0;
  Picoseconds end = 0;
  std::vector<PhotonPair> pairs;
  std::vector<Channel> forced;
};

void run_interval(PipelineConfig const& c, Interval const& iv, std::uint64_t slice,
                  ChannelTimes& out) {
  auto pair_rng = make_engine(c.seed, Stream::pairs, slice);
  auto herald_rng = make_engine(c.seed, Stream::heralds, slice);
  auto noise_rng = make_engine(c.seed, Stream::noise, slice);
  auto circuit_rng = make_engine(c.seed, Stream::circuit, slice);

  std::vector<PhotonPair> pairs = iv.pairs;
  auto background = generate_pairs(c.source, iv.begin, iv.end, pair_rng);
  pairs.insert(pairs.end(), background.begin(), background.end());

  std::array<std::vector<Picoseconds>, kNumChannels> arrivals;
  std::vector<PhotonRecord> heralds;
  std::vector<PhotonRecord> signals;
  signals.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto const& p = pairs[i];
    signals.push_back(p.signal);
    if (i < iv.forced.size()) {
      arrivals[index_of(iv.forced[i])].push_back(p.herald.emission_time);
    } else if (p.heralded) {
      heralds.push_back(p.herald);
    }
  }
  auto const split = split_heralds(heralds, c.herald_to_d1, herald_rng);
  auto& d1 = arrivals[index_of(Channel::D1)];
  auto& d2 = arrivals[index_of(Channel::D2)];
  d1.insert(d1.end(), split.d1.begin(), split.d1.end());
  d2.insert(d2.end(), split.d2.begin(), split.d2.end());

  std::sort(signals.begin(), signals.end(), [](PhotonRecord const& a, PhotonRecord const& b) {
    return a.mode_center < b.mode_center;
  });
  signals = inject_stationary_noise(std::move(signals), c.source, iv.begin, iv.end, noise_rng);
  for (auto const& r : route_circuit(signals, c.circuit, circuit_rng)) {
    arrivals[index_of(r.port)].push_back(r.arrival);
  }

  for (Channel ch : kAllChannels) {
    auto& a = arrivals[index_of(ch)];
    std::sort(a.begin(), a.end());
    DetectorParams d = c.detectors[index_of(ch)];
    d.dead_time = 0;  // applied once over the merged stream
    auto rng = make_engine(c.seed, kDetectStreams[index_of(ch)], slice);
    auto tags = detect(a, d, iv.begin, iv.end, rng);
    auto& o = out[index_of(ch)];
    o.insert(o.end(), tags.begin(), tags.end());
  }
}

TagStream finish(PipelineConfig const& c, ChannelTimes channels) {
  for (Channel ch : kAllChannels) {
    auto& v = channels[index_of(ch)];
    std::sort(v.begin(), v.end());
    v = apply_dead_time(std::move(v), c.detectors[index_of(ch)].dead_time);
  }
  return TagStream(std::move(channels));
}

SimulationOutput simulate_cw(PipelineConfig const& c) {
  auto const end = static_cast<Picoseconds>(std::llround(c.duration_s * kPsPerSecond));
  ChannelTimes channels;
  std::uint64_t slice = 0;
  for (Picoseconds b = 0; b < end; b += c.slice_length, ++slice) {
    Interval iv;
    iv.begin = b;
    iv.end = std::min(end, b + c.slice_length);
    run_interval(c, iv, slice, channels);
  }
  return {finish(c, std::move(channels)), c.duration_s, slice};
}

double herald_pair_sigma(PipelineConfig const& c) {
  double const j1 = c.detectors[index_of(Channel::D1)].jitter_fwhm;
  double const j2 = c.detectors[index_of(Channel::D2)].jitter_fwhm;
  return std::sqrt(j1 * j1 + j2 * j2) / kFwhmPerSigma;
}

SimulationOutput simulate_trials(PipelineConfig const& c) {
  Picoseconds const frame = c.frame_length > 0 ? c.frame_length : default_frame_length(c);
  Picoseconds const lead = frame / 4;  // frame origin inside the frame
  double const half_range = 0.5 * static_cast<double>(c.window_width) + 4.0 * herald_pair_sigma(c);
  auto offset_rng = make_engine(c.seed, Stream::trials);
  std::uniform_real_distribution<double> offset(-half_range, half_range);

  std::uint64_t const frames = 2 * c.trials + c.single_trials;
  ChannelTimes channels;
  for (std::uint64_t f = 0; f < frames; ++f) {
    Interval iv;
    iv.begin = static_cast<Picoseconds>(f) * frame;
    iv.end = iv.begin + frame;
    Picoseconds const origin = iv.begin + lead;
    PhotonPair a{make_herald_photon(c.source, origin), make_signal_photon(c.source, origin), true};
    iv.pairs.push_back(a);
    iv.forced.push_back(Channel::D1);
    // t1 and t0 frames alternate, single-herald frames come last.
    std::uint64_t const kind = f < 2 * c.trials ? f % 2 : 2;
    if (kind < 2) {
      Picoseconds const dt = kind == 0 ? c.t1 : c.t0;
      auto const t = origin + dt + static_cast<Picoseconds>(std::llround(offset(offset_rng)));
      iv.pairs.push_back({make_herald_photon(c.source, t), make_signal_photon(c.source, t), true});
      iv.forced.push_back(Channel::D2);
    }
    run_interval(c, iv, f, channels);
  }
  double const duration = static_cast<double>(frames) * static_cast<double>(frame) / kPsPerSecond;
  return {finish(c, std::move(channels)), duration, frames};
}

}  // namespace

void PipelineConfig::validate() const {
  source.validate();
  circuit.validate();
  for (auto const& d : detectors) d.validate();
  if (!(herald_to_d1 >= 0.0 && herald_to_d1 <= 1.0)) {
    throw ConfigError("herald_to_d1 must be in [0, 1]");
  }
  if (window_width <= 0) throw ConfigError("window width must be > 0");
  if (mode == SourceMode::cw) {
    if (!(duration_s > 0.0)) throw ConfigError("run.duration_s must be > 0");
    if (slice_length <= 0) throw ConfigError("run.slice_length must be > 0");
  } else {
    if (trials == 0 && single_trials == 0) throw ConfigError("run.trials must be > 0");
    if (t0 == t1) throw ConfigError("windows.t0 and windows.t1 must differ");
    if (t0 < 0 || t1 < 0) throw ConfigError("windows.t0 and windows.t1 must be >= 0");
    if (frame_length < 0) throw ConfigError("run.frame_length must be >= 0");
    if (frame_length > 0 && frame_length < default_frame_length(*this)) {
      throw ConfigError("run.frame_length is shorter than " +
                        std::to_string(default_frame_length(*this)) + " ps");
    }
  }
}

Picoseconds default_frame_length(PipelineConfig const& c) {
  double jitter = 0.0;
  for (auto const& d : c.detectors) jitter = std::max(jitter, d.jitter_fwhm);
  double const spread = 8.0 * (c.source.coherence_fwhm + jitter) + static_cast<double>(c.window_width);
  Picoseconds const reach = std::max(c.t0, c.t1) + c.circuit.path_delay +
                            static_cast<Picoseconds>(std::ceil(spread));
  // Origin sits at a quarter of the frame; the reach must fit in the rest
  // with the same margin again before the next frame.
  return 2 * (reach + static_cast<Picoseconds>(std::ceil(spread)));
}

SimulationOutput simulate(PipelineConfig const& config) {
  config.validate();
  return config.mode == SourceMode::cw ? simulate_cw(config) : simulate_trials(config);
}

}  // namespace hom
