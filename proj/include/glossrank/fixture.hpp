#pragma once
// Seeded synthetic VWSD fixture with built-in sense structure.
//
// Base vectors come from SyntheticEncoder; everything else is composed from
// them (all vectors unit-normalized after composition):
//   w        word vector of the target
//   u_k      vector of sense k's definition
//   context  w + alpha * u_correct + 0.1 * noise
//   joint_k  context + beta * u_k
//   gold     joint_correct + sigma * noise
//   the first wrong sense gets a distractor  joint_k + gamma * w + sigma * noise
//   other wrong senses get                   joint_k + sigma * noise
//   remaining candidates are                 noise + 0.3 * w
// Candidate order is shuffled with Philox.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "glossrank/eval.hpp"
#include "glossrank/providers.hpp"
#include "glossrank/sense_inventory.hpp"

namespace glossrank {

struct FixtureParams {
  std::uint64_t seed = 7;
  std::size_t dim = 64;
  double alpha = 0.7;
  double beta = 1.2;
  double gamma = 0.6;
  double sigma = 0.9;
  double logit_scale = 5.0;
  std::size_t candidates = 10;
};

struct Fixture {
  std::vector<VwsdInstance> instances;
  SenseInventory inventory;
  EmbeddingStore store;
};

Fixture build_synthetic_fixture(const FixtureParams& params = {});

/// Writes dataset.tsv, gold.tsv, inventory.tsv and store.tsv into dir.
void write_fixture(const Fixture& fixture, const std::filesystem::path& dir);

}  // namespace glossrank
