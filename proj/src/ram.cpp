#include "tpad/ram.hpp"

#include <array>
#include <utility>

#include "tpad/error.hpp"

namespace tpad {

namespace {

constexpr std::array<std::pair<RamTrojan, std::string_view>, 11> kTrojanNames{{
    {RamTrojan::none, "none"},
    {RamTrojan::wrong_address_read, "wrong_address_read"},
    {RamTrojan::wrong_data_read, "wrong_data_read"},
    {RamTrojan::write_instead_of_read, "write_instead_of_read"},
    {RamTrojan::no_read, "no_read"},
    {RamTrojan::wrong_write_address, "wrong_write_address"},
    {RamTrojan::wrong_data_written, "wrong_data_written"},
    {RamTrojan::read_instead_of_write, "read_instead_of_write"},
    {RamTrojan::no_write, "no_write"},
    {RamTrojan::read_instead_of_idle, "read_instead_of_idle"},
    {RamTrojan::write_instead_of_idle, "write_instead_of_idle"},
}};

}  // namespace

std::string_view to_string(RamOp op) {
  switch (op) {
    case RamOp::idle: return "idle";
    case RamOp::read: return "read";
    case RamOp::write: return "write";
  }
  return "?";
}

std::string_view to_string(RamTrojan t) {
  for (const auto& [k, name] : kTrojanNames)
    if (k == t) return name;
  return "?";
}

std::optional<RamTrojan> ram_trojan_from_string(std::string_view name) {
  for (const auto& [k, n] : kTrojanNames)
    if (n == name) return k;
  return std::nullopt;
}

std::string_view to_string(RamSymptom s) {
  switch (s) {
    case RamSymptom::none: return "none";
    case RamSymptom::check_bits_incorrect: return "check bits at RAM_Out incorrect";
    case RamSymptom::ram_out_ne_data_out: return "RAM_Out != Data_Out";
    case RamSymptom::ram_in_ne_ram_out: return "RAM_In != RAM_Out";
    case RamSymptom::ram_out_eq_data_out: return "RAM_Out = Data_Out";
    case RamSymptom::ram_in_eq_ram_out: return "RAM_In = RAM_Out";
    case RamSymptom::ram_out_changed: return "RAM_Out changed";
  }
  return "?";
}

RamOp trojan_operation(RamTrojan t) {
  switch (t) {
    case RamTrojan::wrong_address_read:
    case RamTrojan::wrong_data_read:
    case RamTrojan::write_instead_of_read:
    case RamTrojan::no_read: return RamOp::read;
    case RamTrojan::wrong_write_address:
    case RamTrojan::wrong_data_written:
    case RamTrojan::read_instead_of_write:
    case RamTrojan::no_write: return RamOp::write;
    case RamTrojan::none:
    case RamTrojan::read_instead_of_idle:
    case RamTrojan::write_instead_of_idle: return RamOp::idle;
  }
  return RamOp::idle;
}

ProtectedRam::ProtectedRam(ParityCheckMatrix h_mem, std::size_t addr_bits, std::size_t word_bits)
    : h_(std::move(h_mem)), addr_bits_(addr_bits), word_bits_(word_bits) {
  if (addr_bits < 1 || addr_bits > 20) throw Error(Errc::invalid_argument, "RAM address width must be 1..20 bits");
  if (word_bits < 1 || word_bits > 32) throw Error(Errc::invalid_argument, "RAM word width must be 1..32 bits");
  if (h_.k() != addr_bits + word_bits)
    throw Error(Errc::width_mismatch, "RAM code must cover address and data (k = " +
                                          std::to_string(addr_bits + word_bits) + ")");
  auto by_matrix = [this](std::uint64_t addr, std::uint64_t data) { return check_of(addr, data); };
  encoder_ = by_matrix;
  checker_ = by_matrix;
  cells_.resize(std::size_t{1} << addr_bits);
  for (std::uint64_t a = 0; a < cells_.size(); ++a) cells_[a] = {0, check_of(a, 0)};
  ram_out_ = cells_[0];
}

void ProtectedRam::set_check_functions(CheckFn encoder, CheckFn checker) {
  encoder_ = std::move(encoder);
  checker_ = std::move(checker);
}

std::uint64_t ProtectedRam::check_of(std::uint64_t addr, std::uint64_t data) const {
  return compute_check_mask(h_, (addr << word_bits_) | data);
}

RamResult ProtectedRam::cycle(RamOp op, std::uint64_t addr, std::uint64_t data_in, const RamFault& fault) {
  if (addr >= cells_.size()) throw Error(Errc::index_out_of_range, "RAM address " + std::to_string(addr) + " out of range");
  const std::uint64_t word_mask = (std::uint64_t{1} << word_bits_) - 1;
  const std::uint64_t addr_mask = cells_.size() - 1;
  data_in &= word_mask;

  const RamWord before_out = ram_out_;
  const std::uint64_t before_data_out = data_out_;
  RamResult res;
  res.ram_in = {data_in, encoder_(addr, data_in)};

  const RamTrojan trojan = trojan_operation(fault.kind) == op ? fault.kind : RamTrojan::none;
  auto do_read = [&](std::uint64_t a) {
    ram_out_ = cells_[a];
    data_out_ = ram_out_.data;
  };
  auto do_write = [&](std::uint64_t a, RamWord w) {
    cells_[a] = w;
    ram_out_ = cells_[a];
  };

  switch (trojan) {
    case RamTrojan::none:
      if (op == RamOp::read) do_read(addr);
      else if (op == RamOp::write) do_write(addr, res.ram_in);
      break;
    case RamTrojan::wrong_address_read: do_read((addr ^ fault.addr_xor) & addr_mask); break;
    case RamTrojan::wrong_data_read:
      ram_out_ = cells_[addr];
      ram_out_.data = (ram_out_.data ^ fault.data_xor) & word_mask;
      data_out_ = ram_out_.data;
      break;
    case RamTrojan::write_instead_of_read: do_write(addr, res.ram_in); break;
    case RamTrojan::no_read: break;
    case RamTrojan::wrong_write_address: do_write((addr ^ fault.addr_xor) & addr_mask, res.ram_in); break;
    case RamTrojan::wrong_data_written:
      do_write(addr, {(data_in ^ fault.data_xor) & word_mask, res.ram_in.check});
      break;
    case RamTrojan::read_instead_of_write: do_read(addr); break;
    // The write is suppressed but the row is still sensed.
    case RamTrojan::no_write: ram_out_ = cells_[addr]; break;
    case RamTrojan::read_instead_of_idle: do_read(addr); break;
    case RamTrojan::write_instead_of_idle: do_write(addr, res.ram_in); break;
  }

  res.ram_out = ram_out_;
  res.data_out = data_out_;
  if (op == RamOp::idle) {
    if (data_out_ != before_data_out) {
      res.symptom = ram_out_.data == data_out_ ? RamSymptom::ram_out_eq_data_out : RamSymptom::ram_out_changed;
    } else if (ram_out_ != before_out) {
      res.symptom = ram_out_ == res.ram_in ? RamSymptom::ram_in_eq_ram_out : RamSymptom::ram_out_changed;
    }
    return res;
  }
  res.syndrome = checker_(addr, ram_out_.data) ^ ram_out_.check;
  if (res.syndrome != 0) {
    res.symptom = RamSymptom::check_bits_incorrect;
  } else if (op == RamOp::read && ram_out_.data != data_out_) {
    res.symptom = RamSymptom::ram_out_ne_data_out;
  } else if (op == RamOp::write && ram_out_ != res.ram_in) {
    res.symptom = RamSymptom::ram_in_ne_ram_out;
  }
  return res;
}

}  // namespace tpad
