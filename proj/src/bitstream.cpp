#include "astarcode/bitstream.hpp"

#include <bit>

namespace astarcode {

void BitWriter::put_bit(bool bit) {
  if (bit_count_ % 8 == 0) bytes_.push_back(0);
  if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80U >> (bit_count_ % 8));
  ++bit_count_;
}

void BitWriter::put_bits(std::uint64_t value, unsigned width) {
  for (unsigned i = width; i-- > 0;) put_bit((value >> i) & 1U);
}

std::string BitWriter::to_string() const {
  std::string s;
  s.reserve(bit_count_);
  for (std::size_t i = 0; i < bit_count_; ++i) {
    s.push_back((bytes_[i / 8] >> (7 - i % 8)) & 1U ? '1' : '0');
  }
  return s;
}

bool BitReader::get_bit() {
  if (position_ >= bytes_.size() * 8) {
    throw MalformedMessageError("bitstream truncated");
  }
  const bool bit = (bytes_[position_ / 8] >> (7 - position_ % 8)) & 1U;
  ++position_;
  return bit;
}

std::uint64_t BitReader::get_bits(unsigned width) {
  if (width > 64) throw MalformedMessageError("field wider than 64 bits");
  std::uint64_t v = 0;
  for (unsigned i = 0; i < width; ++i) v = (v << 1) | static_cast<std::uint64_t>(get_bit());
  return v;
}

namespace {
unsigned floor_log2(std::uint64_t n) { return static_cast<unsigned>(std::bit_width(n)) - 1; }
}  // namespace

unsigned elias_gamma_length(std::uint64_t n) {
  if (n == 0) throw DomainError("elias gamma: n must be >= 1");
  return 2 * floor_log2(n) + 1;
}

unsigned elias_delta_length(std::uint64_t n) {
  if (n == 0) throw DomainError("elias delta: n must be >= 1");
  const unsigned width = floor_log2(n) + 1;
  return elias_gamma_length(width) + width - 1;
}

void write_elias_gamma(BitWriter& out, std::uint64_t n) {
  if (n == 0) throw DomainError("elias gamma: n must be >= 1");
  const unsigned zeros = floor_log2(n);
  out.put_bits(0, zeros);
  out.put_bits(n, zeros + 1);
}

std::uint64_t read_elias_gamma(BitReader& in) {
  unsigned zeros = 0;
  while (!in.get_bit()) {
    if (++zeros > 63) throw MalformedMessageError("elias gamma: run of zeros too long");
  }
  return (std::uint64_t{1} << zeros) | in.get_bits(zeros);
}

void write_elias_delta(BitWriter& out, std::uint64_t n) {
  if (n == 0) throw DomainError("elias delta: n must be >= 1");
  const unsigned width = floor_log2(n) + 1;
  write_elias_gamma(out, width);
  out.put_bits(n, width - 1);
}

std::uint64_t read_elias_delta(BitReader& in) {
  const std::uint64_t width = read_elias_gamma(in);
  if (width > 64) throw MalformedMessageError("elias delta: width exceeds 64 bits");
  const unsigned tail = static_cast<unsigned>(width - 1);
  const std::uint64_t lead = tail == 64 ? 0 : (std::uint64_t{1} << tail);
  return lead | in.get_bits(tail);
}

void pack_exact(BitWriter& out, const Code& code) {
  if (code.variant != CoderVariant::kAS && code.variant != CoderVariant::kAD) {
    throw InvalidCodeError("pack_exact: only AS/AD codes carry a heap index");
  }
  validate_code(code);
  write_elias_gamma(out, code.depth_or_budget);
  out.put_bits(code.payload, code.depth_or_budget - 1);
}

Code unpack_exact(BitReader& in, CoderVariant variant) {
  const std::uint64_t depth = read_elias_gamma(in);
  if (depth > 64) throw MalformedMessageError("exact code: depth exceeds 64");
  const unsigned d = static_cast<unsigned>(depth);
  const std::uint64_t payload = (std::uint64_t{1} << (d - 1)) | in.get_bits(d - 1);
  return {variant, d, payload};
}

void pack_block(BitWriter& out, const CodeBlock& block) {
  if (block.budget < 1 || block.budget > kMaxBudget) {
    throw InvalidCodeError("pack_block: budget out of range");
  }
  for (auto w : block.codewords) {
    if (w >> block.budget) throw InvalidCodeError("pack_block: codeword exceeds the budget");
  }
  write_elias_gamma(out, block.budget);
  write_elias_gamma(out, block.codewords.size() + 1);
  for (auto w : block.codewords) out.put_bits(w, block.budget);
}

CodeBlock unpack_block(BitReader& in) {
  CodeBlock block;
  const std::uint64_t budget = read_elias_gamma(in);
  if (budget > kMaxBudget) throw MalformedMessageError("block: budget out of range");
  block.budget = static_cast<unsigned>(budget);
  const std::uint64_t len = read_elias_gamma(in) - 1;
  if (len > in.bits_available()) throw MalformedMessageError("block: length exceeds stream");
  block.codewords.reserve(len);
  for (std::uint64_t i = 0; i < len; ++i) block.codewords.push_back(in.get_bits(block.budget));
  return block;
}

unsigned symbol_bits(const Code& code) {
  switch (code.variant) {
    case CoderVariant::kAS:
    case CoderVariant::kAD:
      return elias_gamma_length(code.depth_or_budget) + code.depth_or_budget - 1;
    case CoderVariant::kPFR:
      return elias_delta_length(code.payload);
    case CoderVariant::kDAD:
    case CoderVariant::kMRC:
      return elias_gamma_length(code.depth_or_budget) + code.depth_or_budget;
  }
  return 0;
}

void write_message(BitWriter& out, const Message& message) {
  out.put_bit(message.mode == FrameMode::kBlockTied);
  out.put_bits(static_cast<std::uint64_t>(message.variant), 3);
  if (message.mode == FrameMode::kBlockTied) {
    if (message.variant != CoderVariant::kDAD && message.variant != CoderVariant::kMRC) {
      throw InvalidCodeError("block-tied frames carry DAD or MRC codewords only");
    }
    write_elias_gamma(out, message.blocks.size() + 1);
    for (const auto& block : message.blocks) pack_block(out, block);
    return;
  }
  write_elias_gamma(out, message.symbols.size() + 1);
  for (const auto& code : message.symbols) {
    if (code.variant != message.variant) {
      throw InvalidCodeError("message symbols must share the frame's variant");
    }
    validate_code(code);
    switch (code.variant) {
      case CoderVariant::kAS:
      case CoderVariant::kAD:
        pack_exact(out, code);
        break;
      case CoderVariant::kPFR:
        write_elias_delta(out, code.payload);
        break;
      case CoderVariant::kDAD:
      case CoderVariant::kMRC:
        write_elias_gamma(out, code.depth_or_budget);
        out.put_bits(code.payload, code.depth_or_budget);
        break;
    }
  }
}

std::vector<std::uint8_t> serialize_message(const Message& message) {
  BitWriter out;
  write_message(out, message);
  return out.bytes();
}

Message deserialize_message(std::span<const std::uint8_t> bytes) {
  BitReader in(bytes);
  Message message;
  message.mode = in.get_bit() ? FrameMode::kBlockTied : FrameMode::kExactPerSymbol;
  const auto tag = in.get_bits(3);
  if (tag > static_cast<std::uint64_t>(CoderVariant::kMRC)) {
    throw MalformedMessageError("unknown coder variant tag");
  }
  message.variant = static_cast<CoderVariant>(tag);
  const std::uint64_t count = read_elias_gamma(in) - 1;
  if (count > in.bits_available()) throw MalformedMessageError("symbol count exceeds stream");
  if (message.mode == FrameMode::kBlockTied) {
    if (message.variant != CoderVariant::kDAD && message.variant != CoderVariant::kMRC) {
      throw MalformedMessageError("block-tied frame with a non-budgeted variant");
    }
    for (std::uint64_t i = 0; i < count; ++i) message.blocks.push_back(unpack_block(in));
  } else {
    for (std::uint64_t i = 0; i < count; ++i) {
      Code code;
      switch (message.variant) {
        case CoderVariant::kAS:
        case CoderVariant::kAD:
          code = unpack_exact(in, message.variant);
          break;
        case CoderVariant::kPFR: {
          const std::uint64_t k = read_elias_delta(in);
          code = {CoderVariant::kPFR, static_cast<unsigned>(std::bit_width(k)), k};
          break;
        }
        case CoderVariant::kDAD:
        case CoderVariant::kMRC: {
          const std::uint64_t budget = read_elias_gamma(in);
          if (budget > kMaxBudget) throw MalformedMessageError("budget out of range");
          const unsigned b = static_cast<unsigned>(budget);
          code = {message.variant, b, in.get_bits(b)};
          break;
        }
      }
      message.symbols.push_back(code);
    }
  }
  // Only zero padding may follow the last field.
  if (in.bits_available() >= 8) throw MalformedMessageError("trailing bytes after message");
  while (in.bits_available() > 0) {
    if (in.get_bit()) throw MalformedMessageError("nonzero padding bits");
  }
  return message;
}

}  // namespace astarcode
