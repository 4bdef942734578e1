#pragma once

#include "chebtuck/chebtuck.hpp"
#include "chebtuck/cp_tensor.hpp"
#include "chebtuck/dense_tensor.hpp"
#include "chebtuck/newton.hpp"
#include "chebtuck/tucker_tensor.hpp"

#include <cstdint>
#include <string>

namespace chebtuck {

// Self-describing binary container: magic "CTK1", a one-byte kind tag, then
// 64-bit little-endian dims and IEEE doubles. Little-endian hosts only
// (statically asserted in the implementation).
enum class CtkKind : std::uint8_t {
    Dense = 0,
    Cp = 1,
    Tucker = 2,
    ChebTuck = 3,
    Newton = 4,
};

[[nodiscard]] CtkKind peek_kind(const std::string& path);

void write_ctk(const DenseTensor3& t, const std::string& path);
void write_ctk(const CpTensor& t, const std::string& path);
void write_ctk(const TuckerTensor& t, const std::string& path);
void write_ctk(const ChebTuckFunction& g, const std::string& path);
void write_ctk(const NewtonCp& k, const std::string& path);

[[nodiscard]] DenseTensor3 read_ctk_dense(const std::string& path);
[[nodiscard]] CpTensor read_ctk_cp(const std::string& path);
[[nodiscard]] TuckerTensor read_ctk_tucker(const std::string& path);
[[nodiscard]] ChebTuckFunction read_ctk_chebtuck(const std::string& path);
[[nodiscard]] NewtonCp read_ctk_newton(const std::string& path);

}  // namespace chebtuck
