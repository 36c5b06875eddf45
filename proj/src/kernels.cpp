#include "affnego/kernels.hpp"

#include <cstdlib>
#include <string>

namespace affnego::simd {
namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("AFFNEGO_SIMD"); env != nullptr && std::string(env) == "scalar") {
    return scalar_kernels();
  }
  if (const KernelTable* t = avx2_kernels()) return *t;
  if (const KernelTable* t = neon_kernels()) return *t;
  return scalar_kernels();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

}  // namespace affnego::simd
