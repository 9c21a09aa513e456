#include <fstream>
#include <utility>

#include "glossrank/error.hpp"
#include "glossrank/fixture.hpp"
#include "glossrank/kernels.hpp"
#include "glossrank/scoring.hpp"

namespace glossrank {

namespace {

struct Item {
  const char* target;
  const char* context;
  std::vector<const char*> senses;  // inventory order
  std::size_t correct;              // index into senses
};

// 16 ambiguous, 3 single-sense, 1 out-of-inventory target.
const std::vector<Item>& items() {
  static const std::vector<Item> kItems = {
      {"bank", "river bank",
       {"a financial institution that accepts deposits", "sloping land beside a body of water",
        "a supply or stock held in reserve"},
       1},
      {"bass", "bass fish",
       {"the lowest adult male singing voice", "any of various edible freshwater or marine fish"},
       1},
      {"crane", "crane bird",
       {"a lifting machine with a long movable arm", "a large long-necked wading bird"},
       1},
      {"mouse", "computer mouse",
       {"a small rodent with a pointed snout", "a hand-operated device that moves a pointer on a screen"},
       1},
      {"bat", "baseball bat",
       {"a nocturnal flying mammal", "a club used for hitting the ball in games", "a small quantity of drink"},
       1},
      {"club", "golf club",
       {"a formal association of people with common interests", "a stout stick used as a weapon",
        "golf equipment used to hit a golf ball", "a playing card of the suit with trefoils"},
       2},
      {"seal", "seal pup",
       {"a device incised to make an impression", "a marine mammal with flippers"},
       1},
      {"spring", "hot spring",
       {"the season of growth", "a natural flow of ground water", "a metal coil that returns to shape"},
       1},
      {"pitcher", "water pitcher",
       {"the player who throws the ball to the batter", "an open vessel with a handle and a spout"},
       1},
      {"palm", "palm tree",
       {"the inner surface of the hand", "an unbranched tropical tree with a crown of large leaves"},
       1},
      {"mole", "mole animal",
       {"a spot on the skin", "a unit of amount of substance", "a small burrowing insectivorous mammal"},
       2},
      {"chip", "potato chip",
       {"a small fragment broken off", "a microelectronic semiconductor device", "a thin crisp slice of fried potato"},
       2},
      {"organ", "pipe organ",
       {"a fully differentiated part of the body", "a wind instrument with pipes and a keyboard"},
       1},
      {"plant", "power plant",
       {"a living organism lacking locomotion", "buildings for carrying on an industrial process"},
       1},
      {"jam", "traffic jam",
       {"preserve of crushed fruit", "a dense crowd of vehicles that cannot move freely",
        "a difficult situation"},
       1},
      {"ring", "boxing ring",
       {"jewelry worn around the finger", "a square platform enclosed by ropes for boxing",
        "the sound of a bell"},
       1},
      {"aardvark", "aardvark burrow", {"a nocturnal burrowing mammal of africa that eats termites"}, 0},
      {"xylophone", "xylophone mallets", {"a percussion instrument with wooden bars struck by mallets"}, 0},
      {"paddleboat", "paddleboat lake", {"a small pleasure boat propelled by pedal-driven paddles"}, 0},
      {"zorbing", "zorbing hill", {}, 0},
  };
  return kItems;
}

std::vector<double> unit(std::vector<double> v) {
  const double n = l2_norm(v);
  kernels::scale(1.0 / n, v);
  return v;
}

// a + s * b, both already unit vectors
std::vector<double> add(std::vector<double> a, double s, const Representation& b) {
  kernels::axpy(s, b.vec(), a);
  return a;
}

std::vector<double> copy(const Representation& r) { return {r.vec().begin(), r.vec().end()}; }

}  // namespace

Fixture build_synthetic_fixture(const FixtureParams& p) {
  if (p.candidates < 5 || p.dim == 0) throw Error(ErrorCode::kInvalidConfig, "fixture needs >= 5 candidates");
  const SyntheticEncoder enc(p.seed, p.dim);
  Fixture fx{{}, {}, EmbeddingStore(p.dim, p.logit_scale)};

  const auto noise = [&](const std::string& tag) { return enc.encode(RepKind::kImage, "noise/" + tag); };

  std::size_t n = 0;
  for (const Item& item : items()) {
    const std::string id = "syn." + std::string(n < 9 ? "0" : "") + std::to_string(n + 1);
    ++n;
    for (const char* s : item.senses) fx.inventory.add(make_sense(item.target, PartOfSpeech::kNoun, s));

    const Representation w = enc.encode(RepKind::kText, std::string("word/") + item.target);
    std::vector<Representation> u;
    for (const char* s : item.senses) u.push_back(enc.encode(RepKind::kText, std::string("sense/") + s));

    std::vector<double> h = copy(w);
    if (!u.empty()) h = add(std::move(h), p.alpha, u[item.correct]);
    h = unit(add(std::move(h), 0.1, noise(id + "/context")));
    fx.store.add(Representation(item.context, RepKind::kText, h));

    std::vector<std::vector<double>> joints;
    for (std::size_t k = 0; k < u.size(); ++k) {
      joints.push_back(unit(add(h, p.beta, u[k])));
      fx.store.add(Representation(build_joint_text(item.context, item.senses[k]), RepKind::kText, joints.back()));
    }

    // Candidate vectors in construction order; slot 0 is gold.
    std::vector<std::vector<double>> images;
    const std::vector<double>& anchor = joints.empty() ? h : joints[item.correct];
    images.push_back(unit(add(anchor, p.sigma, noise(id + "/gold"))));
    bool first_wrong = true;
    for (std::size_t k = 0; k < joints.size() && images.size() < p.candidates; ++k) {
      if (k == item.correct) continue;
      std::vector<double> v = joints[k];
      if (first_wrong) v = add(std::move(v), p.gamma, w);
      first_wrong = false;
      images.push_back(unit(add(std::move(v), p.sigma, noise(id + "/sense" + std::to_string(k)))));
    }
    while (images.size() < p.candidates) {
      std::vector<double> v = copy(noise(id + "/filler" + std::to_string(images.size())));
      images.push_back(unit(add(std::move(v), 0.3, w)));
    }

    // Fisher-Yates over slots, driven by Philox keyed on the instance id.
    std::vector<std::size_t> order(images.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const PhiloxKey key{fnv1a64(id), p.seed};
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      const auto r = philox4x64_10({i, 0, 0, 0}, key)[0];
      std::swap(order[i], order[static_cast<std::size_t>(r % (i + 1))]);
    }

    VwsdInstance inst;
    inst.id = id;
    inst.target = item.target;
    inst.context = item.context;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const std::string key_name = id + ".img" + std::to_string(pos) + ".jpg";
      inst.candidates.push_back(key_name);
      fx.store.add(Representation(key_name, RepKind::kImage, images[order[pos]]));
      if (order[pos] == 0) inst.gold = key_name;
    }
    inst.validate();
    fx.instances.push_back(std::move(inst));
  }
  return fx;
}

void write_fixture(const Fixture& fx, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIOError, "cannot create " + dir.string() + ": " + ec.message());
  const auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIOError, "cannot write " + (dir / name).string());
    return out;
  };
  {
    auto data = open("dataset.tsv");
    auto gold = open("gold.tsv");
    write_dataset(data, &gold, fx.instances);
  }
  {
    auto inv = open("inventory.tsv");
    fx.inventory.write(inv);
  }
  {
    auto store = open("store.tsv");
    fx.store.write(store);
  }
}

}  // namespace glossrank
