#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "astarcode/coders.hpp"

namespace astarcode {

/// Appends bits MSB-first into bytes; the final byte is zero-padded.
class BitWriter {
 public:
  void put_bit(bool bit);
  /// Writes the low `width` bits of value, most significant first.
  void put_bits(std::uint64_t value, unsigned width);

  std::size_t bit_count() const { return bit_count_; }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  /// "0"/"1" rendering of the written bits (no padding).
  std::string to_string() const;

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bit_count_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  /// Throws MalformedMessageError past the end of the buffer.
  bool get_bit();
  std::uint64_t get_bits(unsigned width);

  std::size_t position() const { return position_; }
  std::size_t bits_available() const { return bytes_.size() * 8 - position_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t position_ = 0;
};

unsigned elias_gamma_length(std::uint64_t n);
unsigned elias_delta_length(std::uint64_t n);

/// floor(log2 n) zeros, then the binary digits of n. Requires n >= 1.
void write_elias_gamma(BitWriter& out, std::uint64_t n);
std::uint64_t read_elias_gamma(BitReader& in);

/// gamma(bit width of n), then the bits of n below its leading one.
void write_elias_delta(BitWriter& out, std::uint64_t n);
std::uint64_t read_elias_delta(BitReader& in);

/// Exact AS/AD code: gamma(D) followed by the D-1 heap-index bits under the
/// implicit leading one.
void pack_exact(BitWriter& out, const Code& code);
Code unpack_exact(BitReader& in, CoderVariant variant);

/// Codes sharing one budget D.
struct CodeBlock {
  unsigned budget = 1;
  std::vector<std::uint64_t> codewords;

  bool operator==(const CodeBlock&) const = default;
};

/// gamma(D), gamma(len + 1), then len fixed-width D-bit codewords.
void pack_block(BitWriter& out, const CodeBlock& block);
CodeBlock unpack_block(BitReader& in);

enum class FrameMode : std::uint8_t { kExactPerSymbol = 0, kBlockTied = 1 };

/// A self-delimiting message.
///
/// Layout (MSB-first, zero-padded to a byte):
///   1 bit   mode (0 per-symbol, 1 block-tied)
///   3 bits  coder variant tag
///   per-symbol: gamma(count + 1), then each symbol
///       AS/AD   pack_exact
///       PFR     delta(K)
///       DAD/MRC gamma(budget), budget-bit codeword
///   block-tied (DAD/MRC only): gamma(block count + 1), then pack_block each
struct Message {
  FrameMode mode = FrameMode::kExactPerSymbol;
  CoderVariant variant = CoderVariant::kAD;
  std::vector<Code> symbols;     // per-symbol mode
  std::vector<CodeBlock> blocks;  // block-tied mode

  bool operator==(const Message&) const = default;
};

void write_message(BitWriter& out, const Message& message);
std::vector<std::uint8_t> serialize_message(const Message& message);
Message deserialize_message(std::span<const std::uint8_t> bytes);

/// Bits spent on one symbol in per-symbol mode.
unsigned symbol_bits(const Code& code);

}  // namespace astarcode
