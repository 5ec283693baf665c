#pragma once

#include <cstdint>

#include "rvdse/asm/assembler.hpp"

namespace rvdse::assembler {

struct KernelParams {
  std::uint32_t stack_pointer = 0x7fc;
  std::uint32_t stack_size = 512;  // bytes per hart
  unsigned harts = 1;

  // Initial sp for hart i: stack_pointer - i * stack_size.
  std::int64_t hart_stack(unsigned hart) const {
    return static_cast<std::int64_t>(stack_pointer) - static_cast<std::int64_t>(hart) * stack_size;
  }
};

// Prepends the bare-metal start-up code at address 0: zero every register,
// read the hart-id word, give each hart its own stack, call `main` (hart 0)
// or `hartN_main`, and park in a self-loop when it returns. Harts beyond
// `harts` park immediately. Each main is entered with a0 = hart id and
// a1 = harts.
// Throws MissingHartMain(N) or InvalidStackLayout.
AssemblySource wrap_kernel(const AssemblySource& app, const KernelParams& params);

// Label of the terminal self-loop emitted by wrap_kernel.
inline constexpr const char* kHaltLabel = "__kernel_halt";

}  // namespace rvdse::assembler
