// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wnr/audio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "wnr/errors.hpp"

namespace wnr {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  bool has(std::size_t n) const { return pos_ + n <= bytes_.size(); }
  std::size_t pos() const { return pos_; }
  void seek(std::size_t p) { pos_ = p; }

  std::uint16_t u16() {
    need(2);
    std::uint16_t v = bytes_[pos_] | (bytes_[pos_ + 1] << 8);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }
  std::string tag() {
    need(4);
    std::string s(reinterpret_cast<const char*>(&bytes_[pos_]), 4);
    pos_ += 4;
    return s;
  }

 private:
  void need(std::size_t n) const {
    if (!has(n)) throw CorruptFileError("wav: unexpected end of data");
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(v & 0xFF);
  out.push_back(v >> 8);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xFF);
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

void require_pipeline_audio(const AudioBuffer& audio) {
  if (audio.sample_rate_hz != kSampleRateHz) {
    throw ConfigError("audio sample rate must be 16000 Hz, got " +
                      std::to_string(audio.sample_rate_hz));
  }
  for (double s : audio.samples) {
    if (!std::isfinite(s)) throw ParameterError("audio contains NaN or Inf");
  }
}

AudioBuffer decode_wav(const std::vector<std::uint8_t>& bytes) {
  ByteReader in(bytes);
  if (!in.has(12)) throw CorruptFileError("wav: file shorter than RIFF header");
  if (in.tag() != "RIFF") throw CorruptFileError("wav: missing RIFF tag");
  in.u32();
  if (in.tag() != "WAVE") throw CorruptFileError("wav: missing WAVE tag");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  while (in.has(8)) {
    const std::string id = in.tag();
    const std::uint32_t size = in.u32();
    const std::size_t body = in.pos();
    if (!in.has(size)) throw CorruptFileError("wav: chunk '" + id + "' truncated");
    if (id == "fmt ") {
      if (size < 16) throw CorruptFileError("wav: fmt chunk too small");
      format = in.u16();
      channels = in.u16();
      rate = in.u32();
      in.u32();  // byte rate
      in.u16();  // block align
      bits = in.u16();
      if (format == kFormatExtensible) {
        if (size < 26) throw CorruptFileError("wav: extensible fmt too small");
        in.seek(body + 24);
        format = in.u16();  // first two bytes of the sub-format GUID
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw CorruptFileError("wav: data chunk before fmt");
      if (channels != 1) {
        throw UnsupportedFormatError("wav: only mono is supported, got " +
                                     std::to_string(channels) + " channels");
      }
      if (rate != kSampleRateHz) {
        throw UnsupportedFormatError("wav: only 16000 Hz is supported, got " +
                                     std::to_string(rate));
      }
      AudioBuffer audio;
      const std::uint8_t* p = bytes.data() + body;
      if (format == kFormatPcm && bits == 16) {
        audio.samples.resize(size / 2);
        for (std::size_t i = 0; i < audio.samples.size(); ++i) {
          auto v = static_cast<std::int16_t>(p[2 * i] | (p[2 * i + 1] << 8));
          audio.samples[i] = v / 32768.0;
        }
      } else if (format == kFormatFloat && bits == 32) {
        audio.samples.resize(size / 4);
        for (std::size_t i = 0; i < audio.samples.size(); ++i) {
          std::uint32_t u = p[4 * i] | (p[4 * i + 1] << 8) |
                            (p[4 * i + 2] << 16) |
                            (static_cast<std::uint32_t>(p[4 * i + 3]) << 24);
          audio.samples[i] = std::bit_cast<float>(u);
        }
      } else {
        throw UnsupportedFormatError("wav: unsupported encoding (format " +
                                     std::to_string(format) + ", " +
                                     std::to_string(bits) + " bits)");
      }
      return audio;
    }
    in.seek(body + size + (size & 1));
  }
  throw CorruptFileError("wav: no data chunk");
}

std::vector<std::uint8_t> encode_wav(const AudioBuffer& audio,
                                     SampleFormat format) {
  const bool pcm = format == SampleFormat::kPcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(audio.samples.size() * (bits / 8));
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, pcm ? kFormatPcm : kFormatFloat);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate_hz));
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate_hz) * (bits / 8));
  put_u16(out, bits / 8);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_size);
  for (double s : audio.samples) {
    if (pcm) {
      double scaled = std::round(s * 32768.0);
      scaled = std::clamp(scaled, -32768.0, 32767.0);
      put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
    } else {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(s)));
    }
  }
  return out;
}

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes);
  } catch (const CorruptFileError& e) {
    throw CorruptFileError(path.string() + ": " + e.what());
  } catch (const UnsupportedFormatError& e) {
    throw UnsupportedFormatError(path.string() + ": " + e.what());
  }
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& audio,
               SampleFormat format) {
  const auto bytes = encode_wav(audio, format);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write failed for " + path.string());
}

}  // namespace wnr
