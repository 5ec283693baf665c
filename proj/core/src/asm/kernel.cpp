#include "rvdse/asm/kernel.hpp"

#include <string>

#include "rvdse/error.hpp"
#include "rvdse/isa/semantics.hpp"

namespace rvdse::assembler {

namespace {
std::string main_label(unsigned hart) {
  return hart == 0 ? std::string("main") : "hart" + std::to_string(hart) + "_main";
}
}  // namespace

AssemblySource wrap_kernel(const AssemblySource& app, const KernelParams& params) {
  if (params.harts < 1) throw Error(ErrorKind::InvalidStackLayout, "harts must be >= 1");
  const auto labels = collect_labels(app);
  for (unsigned h = 0; h < params.harts; ++h) {
    if (!labels.count(main_label(h))) {
      throw Error(ErrorKind::MissingHartMain,
                  "hart " + std::to_string(h) + " needs a '" + main_label(h) + "' label");
    }
    if (params.hart_stack(h) < 0) {
      throw Error(ErrorKind::InvalidStackLayout,
                  "stack for hart " + std::to_string(h) + " starts below address 0");
    }
  }

  AssemblySource out;
  auto& l = out.lines;
  l.emplace_back("# ---- bare-metal start-up ----");
  l.emplace_back(".org 0");
  l.emplace_back("_start:");
  for (int r = 1; r < 32; ++r) l.push_back("    addi x" + std::to_string(r) + ", x0, 0");
  const auto hart_id_offset = static_cast<std::int32_t>(isa::kHartIdAddress);
  l.push_back("    lw t0, " + std::to_string(hart_id_offset) + "(zero)");
  for (unsigned h = 0; h < params.harts; ++h) {
    const std::string next = "__kernel_dispatch_" + std::to_string(h + 1);
    l.push_back("__kernel_dispatch_" + std::to_string(h) + ":");
    l.push_back("    li t1, " + std::to_string(h));
    l.push_back("    bne t0, t1, " + next);
    l.push_back("    li sp, " + std::to_string(params.hart_stack(h)));
    l.push_back("    mv a0, t0");
    l.push_back("    li a1, " + std::to_string(params.harts));
    l.push_back("    call " + main_label(h));
    l.push_back("    j " + std::string(kHaltLabel));
  }
  l.push_back("__kernel_dispatch_" + std::to_string(params.harts) + ":");
  l.push_back(std::string(kHaltLabel) + ":");
  l.push_back("    j " + std::string(kHaltLabel));
  l.emplace_back("# ---- application ----");
  l.insert(l.end(), app.lines.begin(), app.lines.end());
  return out;
}

}  // namespace rvdse::assembler
