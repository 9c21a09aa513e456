#include <atomic>
#include <cstdlib>
#include <string>

#include "glossrank/error.hpp"
#include "kernels_impl.hpp"

namespace glossrank::kernels {

namespace {

bool cpu_has_avx2_fma() noexcept {
#if defined(GLOSSRANK_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() noexcept {
  Isa isa = best_available();
  if (const char* env = std::getenv("GLOSSRANK_KERNEL")) {
    if (auto parsed = parse_isa(env); parsed && available(*parsed)) isa = *parsed;
  }
  return isa == Isa::kAvx2 ? avx2_table() : &scalar_table();
}

std::atomic<const KernelTable*>& active_slot() noexcept {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

const KernelTable* avx2_table() noexcept {
#if defined(GLOSSRANK_HAVE_AVX2)
  return &detail::avx2_table_impl();
#else
  return nullptr;
#endif
}

bool available(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar: return true;
    case Isa::kAvx2: {
      static const bool ok = avx2_table() != nullptr && cpu_has_avx2_fma();
      return ok;
    }
  }
  return false;
}

Isa best_available() noexcept { return available(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar; }

const KernelTable& table(Isa isa) {
  if (!available(isa)) {
    throw Error(ErrorCode::kInvalidConfig,
                "kernel variant '" + std::string(name(isa)) + "' is not available on this CPU/build");
  }
  return isa == Isa::kAvx2 ? *avx2_table() : scalar_table();
}

const KernelTable& active() noexcept { return *active_slot().load(std::memory_order_acquire); }

void set_active(Isa isa) { active_slot().store(&table(isa), std::memory_order_release); }

std::string_view name(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

std::optional<Isa> parse_isa(std::string_view s) noexcept {
  if (s == "scalar") return Isa::kScalar;
  if (s == "avx2") return Isa::kAvx2;
  if (s == "auto") return best_available();
  return std::nullopt;
}

}  // namespace glossrank::kernels
