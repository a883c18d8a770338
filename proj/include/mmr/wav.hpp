#pragma once

// RIFF/WAVE PCM encoding and tone synthesis.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "mmr/error.hpp"

namespace mmr::wav {

inline constexpr int kDefaultSampleRate = 44100;
inline constexpr double kAmplitude = 0.5;
inline constexpr double kRampSeconds = 0.005;

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

}  // namespace detail

// 16-bit little-endian mono.
inline std::string encode(const std::vector<double>& samples, int sample_rate) {
  if (sample_rate <= 0) throw Error("invalid-sample-rate", "sample rate must be positive");
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  detail::put_u32(out, 36 + data_bytes);
  out += "WAVE";
  out += "fmt ";
  detail::put_u32(out, 16);
  detail::put_u16(out, 1);  // PCM
  detail::put_u16(out, 1);  // mono
  detail::put_u32(out, static_cast<std::uint32_t>(sample_rate));
  detail::put_u32(out, static_cast<std::uint32_t>(sample_rate) * 2);
  detail::put_u16(out, 2);
  detail::put_u16(out, 16);
  out += "data";
  detail::put_u32(out, data_bytes);
  for (double s : samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    const auto v = static_cast<std::int16_t>(std::lround(c * 32767.0));
    detail::put_u16(out, static_cast<std::uint16_t>(v));
  }
  return out;
}

struct Decoded {
  int sample_rate = 0;
  std::vector<std::int16_t> samples;
};

inline Decoded decode(const std::string& bytes) {
  auto u32 = [&](std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(bytes[at + static_cast<std::size_t>(i)]);
    return v;
  };
  if (bytes.size() < 44 || bytes.compare(0, 4, "RIFF") != 0 || bytes.compare(8, 4, "WAVE") != 0) {
    throw Error("parse-error", "not a RIFF/WAVE buffer");
  }
  Decoded d;
  d.sample_rate = static_cast<int>(u32(24));
  const std::uint32_t n = u32(40);
  if (44 + static_cast<std::size_t>(n) > bytes.size()) throw Error("parse-error", "truncated WAV data");
  for (std::size_t i = 0; i < n / 2; ++i) {
    const auto lo = static_cast<unsigned char>(bytes[44 + 2 * i]);
    const auto hi = static_cast<unsigned char>(bytes[45 + 2 * i]);
    d.samples.push_back(static_cast<std::int16_t>(static_cast<std::uint16_t>(lo | (hi << 8))));
  }
  return d;
}

inline std::size_t frame_at(double seconds, int sample_rate) {
  return static_cast<std::size_t>(std::llround(std::max(0.0, seconds) * sample_rate));
}

// Adds a constant-amplitude sine with short linear fades into `buffer`.
inline void add_tone(std::vector<double>& buffer, double start, double duration, double frequency, int sample_rate,
                     double amplitude = kAmplitude) {
  const std::size_t a = frame_at(start, sample_rate);
  const std::size_t b = std::min(frame_at(start + duration, sample_rate), buffer.size());
  if (b <= a) return;
  const std::size_t n = b - a;
  const auto ramp = std::min<std::size_t>(static_cast<std::size_t>(kRampSeconds * sample_rate), n / 2);
  for (std::size_t i = 0; i < n; ++i) {
    double env = 1.0;
    if (ramp > 0) {
      if (i < ramp) env = static_cast<double>(i) / static_cast<double>(ramp);
      else if (n - 1 - i < ramp) env = static_cast<double>(n - 1 - i) / static_cast<double>(ramp);
    }
    const double phase = 2.0 * std::numbers::pi * frequency * static_cast<double>(i) / sample_rate;
    buffer[a + i] += amplitude * env * std::sin(phase);
  }
}

}  // namespace mmr::wav
