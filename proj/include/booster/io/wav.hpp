#ifndef BOOSTER_IO_WAV_HPP
#define BOOSTER_IO_WAV_HPP

#include <booster/dsp/audio_buffer.hpp>
#include <booster/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

namespace booster::wav {

/// Decoded RIFF/WAVE contents, de-interleaved, full scale +/-1.0.
struct WavData {
  int sample_rate_hz = 0;
  int bits_per_sample = 0;
  bool is_float = false;
  std::vector<std::vector<double>> channels;

  [[nodiscard]] std::size_t frames() const noexcept { return channels.empty() ? 0 : channels.front().size(); }
};

namespace detail {

inline std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}
inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xfffe;

} // namespace detail

/// Decodes 16/24/32-bit integer PCM and 32-bit float WAV.
inline WavData decode(std::span<const std::uint8_t> bytes) {
  using namespace detail;
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError("not a RIFF/WAVE stream");
  }
  std::size_t pos = 12;
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  bool have_fmt = false;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;

  while (pos + 8 <= bytes.size()) {
    const auto* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      // Tolerate a truncated data chunk (streams written without a final size).
      if (std::memcmp(chunk, "data", 4) == 0) {
        data = bytes.data() + body;
        data_size = bytes.size() - body;
        break;
      }
      throw FormatError("WAV chunk overruns the stream");
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw FormatError("WAV fmt chunk too short");
      format = read_u16(chunk + 8);
      channels = read_u16(chunk + 10);
      rate = read_u32(chunk + 12);
      bits = read_u16(chunk + 22);
      if (format == kFormatExtensible && size >= 40) {
        format = read_u16(chunk + 32);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = size;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) throw FormatError("WAV stream has no fmt chunk");
  if (data == nullptr) throw FormatError("WAV stream has no data chunk");
  if (channels == 0) throw FormatError("WAV stream declares zero channels");

  const bool pcm_ok = format == kFormatPcm && (bits == 16 || bits == 24 || bits == 32);
  const bool float_ok = format == kFormatFloat && bits == 32;
  if (!pcm_ok && !float_ok) {
    throw FormatError("unsupported WAV encoding (format " + std::to_string(format) + ", " + std::to_string(bits) +
                      " bits); expected 16/24/32-bit PCM or 32-bit float");
  }

  WavData out;
  out.sample_rate_hz = static_cast<int>(rate);
  out.bits_per_sample = bits;
  out.is_float = float_ok;
  const std::size_t stride = static_cast<std::size_t>(bits / 8) * channels;
  const std::size_t frames = data_size / stride;
  out.channels.assign(channels, std::vector<double>(frames));
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t c = 0; c < channels; ++c) {
      const std::uint8_t* s = data + f * stride + c * (bits / 8);
      double v = 0.0;
      if (float_ok) {
        float fv;
        const std::uint32_t raw = read_u32(s);
        std::memcpy(&fv, &raw, sizeof fv);
        v = fv;
      } else if (bits == 16) {
        v = static_cast<std::int16_t>(read_u16(s)) / 32768.0;
      } else if (bits == 24) {
        std::int32_t i = static_cast<std::int32_t>(s[0] | (s[1] << 8) | (s[2] << 16));
        if (i & 0x800000) i -= 0x1000000;
        v = i / 8388608.0;
      } else {
        v = static_cast<std::int32_t>(read_u32(s)) / 2147483648.0;
      }
      if (!std::isfinite(v)) throw FormatError("WAV stream contains a non-finite sample");
      out.channels[c][f] = v;
    }
  }
  return out;
}

/// Full-scale value to 16-bit code: round to nearest, clamp to the code range.
/// No dither is applied.
inline std::int16_t to_pcm16(double x) {
  const double scaled = std::nearbyint(x * 32768.0);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

/// 16-bit PCM WAV with one channel per input buffer.
inline std::vector<std::uint8_t> encode_pcm16(std::span<const AudioBuffer* const> channels) {
  using namespace detail;
  if (channels.empty()) throw ParameterError("encode_pcm16: no channels");
  const auto frames = channels.front()->size();
  const int rate = channels.front()->sample_rate_hz();
  for (const auto* ch : channels) {
    if (ch->size() != frames || ch->sample_rate_hz() != rate) {
      throw ParameterError("encode_pcm16: channels differ in length or rate");
    }
  }
  const auto nch = static_cast<std::uint16_t>(channels.size());
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(frames * nch * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, nch);
  put_u32(out, static_cast<std::uint32_t>(rate));
  put_u32(out, static_cast<std::uint32_t>(rate) * nch * 2);
  put_u16(out, static_cast<std::uint16_t>(nch * 2));
  put_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_bytes);
  for (std::size_t f = 0; f < frames; ++f) {
    for (const auto* ch : channels) {
      put_u16(out, static_cast<std::uint16_t>(to_pcm16((*ch)[f])));
    }
  }
  return out;
}

inline std::vector<std::uint8_t> encode_pcm16(const StereoBuffer& stereo) {
  const AudioBuffer* chans[] = {&stereo.left(), &stereo.right()};
  return encode_pcm16(chans);
}

inline std::vector<std::uint8_t> encode_pcm16(const AudioBuffer& mono) {
  const AudioBuffer* chans[] = {&mono};
  return encode_pcm16(chans);
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StorageError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw StorageError("short write to " + path.string());
}

inline WavData read(const std::filesystem::path& path) {
  try {
    return decode(read_file_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline void write_pcm16(const std::filesystem::path& path, const AudioBuffer& mono) {
  write_file_bytes(path, encode_pcm16(mono));
}

inline void write_pcm16(const std::filesystem::path& path, const StereoBuffer& stereo) {
  write_file_bytes(path, encode_pcm16(stereo));
}

/// 32-bit float WAV; used for intermediate files that must not be requantized.
inline std::vector<std::uint8_t> encode_float32(const AudioBuffer& mono) {
  using namespace detail;
  const auto frames = mono.size();
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(frames * 4);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, kFormatFloat);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(mono.sample_rate_hz()));
  put_u32(out, static_cast<std::uint32_t>(mono.sample_rate_hz()) * 4);
  put_u16(out, 4);
  put_u16(out, 32);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_bytes);
  for (std::size_t f = 0; f < frames; ++f) {
    const float v = static_cast<float>(mono[f]);
    std::uint32_t raw;
    std::memcpy(&raw, &v, sizeof raw);
    put_u32(out, raw);
  }
  return out;
}

inline void write_float32(const std::filesystem::path& path, const AudioBuffer& mono) {
  write_file_bytes(path, encode_float32(mono));
}

} // namespace booster::wav

#endif
