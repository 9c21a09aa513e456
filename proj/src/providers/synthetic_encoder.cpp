#include <cmath>
#include <numbers>

#include "glossrank/error.hpp"
#include "glossrank/providers.hpp"

namespace glossrank {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) noexcept {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

__extension__ typedef unsigned __int128 u128;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) noexcept {
  const u128 p = static_cast<u128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

inline PhiloxCounter philox_round(const PhiloxCounter& c, const PhiloxKey& k) noexcept {
  std::uint64_t hi0, lo0, hi1, lo1;
  mulhilo(0xD2E7470EE14C6C93ULL, c[0], hi0, lo0);
  mulhilo(0xCA5A826395121157ULL, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

double to_open_unit(std::uint64_t x) noexcept {
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

PhiloxCounter philox4x64_10(PhiloxCounter ctr, PhiloxKey key) noexcept {
  ctr = philox_round(ctr, key);
  for (int r = 1; r < 10; ++r) {
    key[0] += 0x9E3779B97F4A7C15ULL;
    key[1] += 0xBB67AE8584CAA73BULL;
    ctr = philox_round(ctr, key);
  }
  return ctr;
}

SyntheticEncoder::SyntheticEncoder(std::uint64_t seed, std::size_t dim) : seed_(seed), dim_(dim) {
  if (dim_ == 0) throw Error(ErrorCode::kInvalidConfig, "synthetic encoder dim must be positive");
}

std::vector<double> SyntheticEncoder::normals(RepKind kind, std::string_view input) const {
  if (input.empty()) throw Error(ErrorCode::kEmptyInput, "synthetic encoder input is empty");

  std::string prefix(10, '\0');
  for (int i = 0; i < 8; ++i) prefix[i] = static_cast<char>((seed_ >> (8 * i)) & 0xff);
  prefix[8] = kind == RepKind::kText ? 'T' : 'I';
  prefix[9] = '\x1f';
  const std::uint64_t h = fnv1a64(input, fnv1a64(prefix));
  const PhiloxKey key{h, seed_};

  std::vector<double> out;
  out.reserve(dim_ + 3);
  for (std::uint64_t block = 0; out.size() < dim_; ++block) {
    const PhiloxCounter words = philox4x64_10({block, 0, 0, 0}, key);
    for (int pair = 0; pair < 2; ++pair) {
      const double u1 = to_open_unit(words[2 * pair]);
      const double u2 = to_open_unit(words[2 * pair + 1]);
      const double r = std::sqrt(-2.0 * std::log(u1));
      const double theta = 2.0 * std::numbers::pi * u2;
      out.push_back(r * std::cos(theta));
      out.push_back(r * std::sin(theta));
    }
  }
  out.resize(dim_);
  return out;
}

Representation SyntheticEncoder::encode(RepKind kind, std::string_view input) const {
  std::vector<double> v = normals(kind, input);
  const double norm = l2_norm(v);
  for (double& x : v) x /= norm;
  return Representation(std::string(input), kind, std::move(v));
}

}  // namespace glossrank
