#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "tpad/parity_code.hpp"

namespace tpad {

enum class RamOp : std::uint8_t { idle, read, write };

/// The ten Trojan behaviours of the protected-RAM table, grouped by the
/// operation they subvert. A Trojan only acts on cycles whose requested
/// operation matches its group.
enum class RamTrojan : std::uint8_t {
  none,
  wrong_address_read,
  wrong_data_read,
  write_instead_of_read,
  no_read,
  wrong_write_address,
  wrong_data_written,
  read_instead_of_write,
  no_write,
  read_instead_of_idle,
  write_instead_of_idle,
};

/// What the read/write checker observed.
enum class RamSymptom : std::uint8_t {
  none,
  check_bits_incorrect,  // check bits at RAM_Out incorrect
  ram_out_ne_data_out,   // RAM_Out != Data_Out
  ram_in_ne_ram_out,     // RAM_In != RAM_Out
  ram_out_eq_data_out,   // RAM_Out = Data_Out (idle cycle with a read)
  ram_in_eq_ram_out,     // RAM_In = RAM_Out (idle cycle with a write)
  ram_out_changed,       // idle cycle with some other change
};

std::string_view to_string(RamOp op);
std::string_view to_string(RamTrojan t);
std::string_view to_string(RamSymptom s);
std::optional<RamTrojan> ram_trojan_from_string(std::string_view name);
RamOp trojan_operation(RamTrojan t);

struct RamFault {
  RamTrojan kind = RamTrojan::none;
  /// Address perturbation for the wrong-address Trojans.
  std::uint64_t addr_xor = 1;
  /// Data perturbation for the wrong-data Trojans.
  std::uint64_t data_xor = 1;
};

struct RamWord {
  std::uint64_t data = 0;
  std::uint64_t check = 0;
  friend bool operator==(const RamWord&, const RamWord&) = default;
};

struct RamResult {
  RamWord ram_in;
  RamWord ram_out;
  std::uint64_t data_out = 0;
  RamSymptom symptom = RamSymptom::none;
  /// expected check XOR check at RAM_Out, for read and write cycles.
  std::uint64_t syndrome = 0;
};

/// Word-organized RAM whose rows store (data, check) with check bits computed
/// over (address, data): as an integer the code's info word is
/// (address << word_bits) | data. Write-through: a write's sensed row
/// appears at RAM_Out. Data_Out is a latch loaded by the array's read strobe.
class ProtectedRam {
 public:
  using CheckFn = std::function<std::uint64_t(std::uint64_t addr, std::uint64_t data)>;

  ProtectedRam(ParityCheckMatrix h_mem, std::size_t addr_bits, std::size_t word_bits = 16);

  /// Replaces the encoder (RAM_In side) and checker (RAM_Out side) parity
  /// functions, e.g. with obfuscated netlists. Both default to the matrix.
  void set_check_functions(CheckFn encoder, CheckFn checker);

  RamResult cycle(RamOp op, std::uint64_t addr, std::uint64_t data_in, const RamFault& fault = {});

  std::uint64_t check_of(std::uint64_t addr, std::uint64_t data) const;
  std::size_t depth() const noexcept { return cells_.size(); }
  std::size_t addr_bits() const noexcept { return addr_bits_; }
  std::size_t word_bits() const noexcept { return word_bits_; }
  const ParityCheckMatrix& code() const noexcept { return h_; }
  const RamWord& cell(std::uint64_t addr) const { return cells_.at(addr); }
  const RamWord& ram_out() const noexcept { return ram_out_; }
  std::uint64_t data_out() const noexcept { return data_out_; }

 private:
  ParityCheckMatrix h_;
  std::size_t addr_bits_;
  std::size_t word_bits_;
  std::vector<RamWord> cells_;
  RamWord ram_out_;
  std::uint64_t data_out_ = 0;
  CheckFn encoder_;
  CheckFn checker_;
};

}  // namespace tpad
