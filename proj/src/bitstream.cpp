// SPDX-License-Identifier: Apache-2.0
#include "mtlmon/bitstream.hpp"

#include <fstream>
#include <iterator>

#include "mtlmon/errors.hpp"

namespace mtlmon {

BitCounts bit_counts(const FabricConfig& cfg) {
  const std::uint64_t lq = ceil_log2(cfg.n_q);
  const std::uint64_t lpe = ceil_log2(cfg.n_pe);
  const std::uint64_t lap = ceil_log2(cfg.n_ap);
  const std::uint64_t lsz = ceil_log2(cfg.q_sz);
  BitCounts c;
  c.pe_record = 6 + lq + 4 * lsz;
  c.q_record = 3 + lpe + lsz;
  c.route_record = 2 * lap;
  c.pe_bits = cfg.n_pe * c.pe_record;
  c.q_bits = cfg.n_q * c.q_record;
  c.route_bits = cfg.n_pe * c.route_record;
  return c;
}

void BitWriter::put(std::uint64_t value, unsigned width, const char* field) {
  if (width < 64 && (value >> width) != 0) {
    throw BitstreamError(std::string("value ") + std::to_string(value) +
                         " overflows " + std::to_string(width) +
                         "-bit field " + field);
  }
  for (unsigned i = width; i-- > 0;) {
    if (bits_ % 8 == 0) bytes_.push_back(0);
    if ((value >> i) & 1u) {
      bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bits_ % 8));
    }
    ++bits_;
  }
}

std::vector<std::uint8_t> BitWriter::finish() { return std::move(bytes_); }

std::uint64_t BitReader::get(unsigned width) {
  if (pos_ + width > bytes_.size() * 8) {
    throw BitstreamError("bitstream truncated at bit " + std::to_string(pos_));
  }
  std::uint64_t v = 0;
  for (unsigned i = 0; i < width; ++i, ++pos_) {
    v = (v << 1) | ((bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1u);
  }
  return v;
}

bool BitReader::rest_is_zero() const {
  for (std::uint64_t p = pos_; p < bytes_.size() * 8; ++p) {
    if ((bytes_[p / 8] >> (7 - p % 8)) & 1u) return false;
  }
  return true;
}

std::vector<std::uint8_t> encode_bitstream(const MonitorProgram& prog,
                                           const FabricConfig& cfg) {
  if (prog.pes.size() != cfg.n_pe || prog.qs.size() != cfg.n_q ||
      prog.ap2pe.size() != cfg.n_pe) {
    throw BitstreamError("program dimensions do not match " + to_string(cfg));
  }
  const unsigned lq = ceil_log2(cfg.n_q);
  const unsigned lpe = ceil_log2(cfg.n_pe);
  const unsigned lap = ceil_log2(cfg.n_ap);
  const unsigned lsz = ceil_log2(cfg.q_sz);

  BitWriter w;
  for (const auto& pe : prog.pes) {
    w.put(pe.active, 1, "isActive");
    w.put(static_cast<unsigned>(pe.op0_src), 1, "op0Src");
    w.put(static_cast<unsigned>(pe.op1_src), 1, "op1Src");
    w.put(static_cast<unsigned>(pe.opcode), 3, "opcode");
    w.put(pe.r_qid, lq, "rQid");
    w.put(pe.i_top.lo, lsz, "iTop.lo");
    w.put(pe.i_top.hi, lsz, "iTop.hi");
    w.put(pe.i_bot.lo, lsz, "iBot.lo");
    w.put(pe.i_bot.hi, lsz, "iBot.hi");
  }
  for (const auto& q : prog.qs) {
    w.put(q.active, 1, "isActive");
    w.put(q.is_verdict, 1, "isVerdict");
    w.put(q.reader_pe, lpe, "readerPE");
    w.put(q.inp_no, 1, "inpNo");
    w.put(q.head, lsz, "head");
  }
  for (const auto& r : prog.ap2pe) {
    w.put(r[0], lap, "ap2pe.op0");
    w.put(r[1], lap, "ap2pe.op1");
  }
  return w.finish();
}

MonitorProgram decode_bitstream(std::span<const std::uint8_t> bytes,
                                const FabricConfig& cfg) {
  const BitCounts counts = bit_counts(cfg);
  if (bytes.size() != counts.bytes()) {
    throw BitstreamError("bitstream is " + std::to_string(bytes.size()) +
                         " bytes, " + to_string(cfg) + " needs " +
                         std::to_string(counts.bytes()));
  }
  const unsigned lq = ceil_log2(cfg.n_q);
  const unsigned lpe = ceil_log2(cfg.n_pe);
  const unsigned lap = ceil_log2(cfg.n_ap);
  const unsigned lsz = ceil_log2(cfg.q_sz);

  BitReader r(bytes);
  MonitorProgram prog = MonitorProgram::inactive(cfg);
  auto interval = [&] {
    Interval iv;
    iv.lo = static_cast<std::uint32_t>(r.get(lsz));
    iv.hi = static_cast<std::uint32_t>(r.get(lsz));
    return iv;
  };
  for (std::uint32_t i = 0; i < cfg.n_pe; ++i) {
    PeConfig& pe = prog.pes[i];
    pe.active = r.get(1);
    pe.op0_src = static_cast<OperandSource>(r.get(1));
    pe.op1_src = static_cast<OperandSource>(r.get(1));
    const auto op = r.get(3);
    if (op > static_cast<unsigned>(Opcode::Implies)) {
      throw BitstreamError("PE" + std::to_string(i) + " has undefined opcode " +
                           std::to_string(op));
    }
    pe.opcode = static_cast<Opcode>(op);
    pe.r_qid = static_cast<std::uint32_t>(r.get(lq));
    pe.i_top = interval();
    pe.i_bot = interval();
  }
  for (auto& q : prog.qs) {
    q.active = r.get(1);
    q.is_verdict = r.get(1);
    q.reader_pe = static_cast<std::uint32_t>(r.get(lpe));
    q.inp_no = static_cast<std::uint8_t>(r.get(1));
    q.head = static_cast<std::uint32_t>(r.get(lsz));
  }
  for (auto& route : prog.ap2pe) {
    route[0] = static_cast<std::uint32_t>(r.get(lap));
    route[1] = static_cast<std::uint32_t>(r.get(lap));
  }
  if (!r.rest_is_zero()) throw BitstreamError("nonzero padding bits");
  try {
    prog.reported_latency = derive_latency(prog, cfg);
  } catch (const ProgramError&) {
    prog.reported_latency = 0;
  }
  return prog;
}

namespace {

void put16(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get16(std::span<const std::uint8_t> b, std::size_t at) {
  return (std::uint32_t{b[at]} << 8) | b[at + 1];
}

}  // namespace

std::vector<std::uint8_t> encode_header(const FabricConfig& cfg) {
  for (auto v : {cfg.n_pe, cfg.n_q, cfg.n_ap, cfg.q_sz}) {
    if (v > 0xFFFF) {
      throw BitstreamError("fabric dimension " + std::to_string(v) +
                           " does not fit the 16-bit header field");
    }
  }
  std::vector<std::uint8_t> h = {'M', 'T', 'L', 'B'};
  put16(h, kBitstreamVersion);
  put16(h, cfg.n_pe);
  put16(h, cfg.n_q);
  put16(h, cfg.n_ap);
  put16(h, cfg.q_sz);
  put16(h, 0);
  return h;
}

BitstreamFile parse_bitstream_file(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) {
    throw BitstreamError("bitstream file shorter than its header");
  }
  if (bytes[0] != 'M' || bytes[1] != 'T' || bytes[2] != 'L' ||
      bytes[3] != 'B') {
    throw BitstreamError("bad bitstream magic");
  }
  if (get16(bytes, 4) != kBitstreamVersion) {
    throw BitstreamError("unsupported bitstream version " +
                         std::to_string(get16(bytes, 4)));
  }
  if (get16(bytes, 14) != 0) throw BitstreamError("reserved header bytes set");
  BitstreamFile f;
  f.cfg.n_pe = get16(bytes, 6);
  f.cfg.n_q = get16(bytes, 8);
  f.cfg.n_ap = get16(bytes, 10);
  f.cfg.q_sz = get16(bytes, 12);
  if (f.cfg.n_pe == 0 || f.cfg.n_q == 0 || f.cfg.n_ap == 0 || f.cfg.q_sz == 0) {
    throw BitstreamError("header declares a zero fabric dimension");
  }
  f.body.assign(bytes.begin() + kHeaderSize, bytes.end());
  if (f.body.size() != bit_counts(f.cfg).bytes()) {
    throw BitstreamError("bitstream body is " + std::to_string(f.body.size()) +
                         " bytes, header config needs " +
                         std::to_string(bit_counts(f.cfg).bytes()));
  }
  return f;
}

void write_bitstream_file(const std::string& path, const FabricConfig& cfg,
                          std::span<const std::uint8_t> body) {
  auto bytes = encode_header(cfg);
  bytes.insert(bytes.end(), body.begin(), body.end());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw BitstreamError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw BitstreamError("write to " + path + " failed");
}

BitstreamFile read_bitstream_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BitstreamError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return parse_bitstream_file(bytes);
}

}  // namespace mtlmon
