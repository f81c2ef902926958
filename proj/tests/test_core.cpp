#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "doctest.h"
#include "hubrl/angles.hpp"
#include "hubrl/errors.hpp"
#include "hubrl/normalize.hpp"
#include "hubrl/replay_buffer.hpp"
#include "hubrl/rng.hpp"
#include "hubrl/types.hpp"

using namespace hubrl;

// ---------------------------------------------------------------- rng

TEST_CASE("rng matches the published splitmix64 output stream") {
  // reference outputs of splitmix64 (public-domain reference implementation)
  SeededRng r0(0);
  CHECK(r0.next_u64() == 0xe220a8397b1dcdafull);
  CHECK(r0.next_u64() == 0x6e789e6aa1b965f4ull);
  CHECK(r0.next_u64() == 0x06c45d188009454full);

  SeededRng r42(42);
  CHECK(r42.next_u64() == 0xbdd732262feb6e95ull);
  CHECK(r42.next_u64() == 0x28efe333b266f103ull);
}

TEST_CASE("rng uniform stays in range and is unbiased") {
  SeededRng r(7);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000.0 == doctest::Approx(0.5).epsilon(0.02));

  SeededRng rb(8);
  for (int i = 0; i < 1000; ++i) {
    const double u = rb.uniform(-3.0, 5.0);
    CHECK(u >= -3.0);
    CHECK(u < 5.0);
  }
}

TEST_CASE("rng index covers [0, n)") {
  SeededRng r(3);
  std::set<std::size_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t k = r.index(7);
    CHECK(k < 7);
    seen.insert(k);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("rng normal has standard moments") {
  SeededRng r(11);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(mean == doctest::Approx(0.0).epsilon(1).scale(0.02));
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));

  SeededRng rs(11);
  const double shifted = rs.normal(10.0, 2.0);
  SeededRng rs2(11);
  CHECK(shifted == doctest::Approx(10.0 + 2.0 * rs2.normal()));
}

TEST_CASE("rng streams are reproducible across instances") {
  SeededRng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
}

TEST_CASE("rng fork gives decoupled named substreams") {
  SeededRng parent(99);
  const std::uint64_t before = parent.state();
  SeededRng c1 = parent.fork("alpha");
  SeededRng c2 = parent.fork("beta");
  SeededRng c1again = parent.fork("alpha");
  CHECK(parent.state() == before);  // fork never advances the parent

  CHECK(c1.next_u64() == c1again.next_u64());  // same tag, same stream
  SeededRng c1b = SeededRng(99).fork("alpha");
  (void)c1b.next_u64();  // catch up with c1, which has already drawn once
  CHECK(c1.next_u64() == c1b.next_u64());

  // different tags diverge
  SeededRng d1 = SeededRng(99).fork("alpha");
  SeededRng d2 = SeededRng(99).fork("beta");
  CHECK(d1.next_u64() != d2.next_u64());

  // child stream differs from the parent's own continuation
  SeededRng p2(99);
  SeededRng c3 = p2.fork("gamma");
  CHECK(c3.next_u64() != p2.next_u64());
  (void)c2;
}

// ---------------------------------------------------------------- angles

TEST_CASE("positive_fmod wraps negatives up") {
  CHECK(positive_fmod(-30.0, 360.0) == doctest::Approx(330.0));
  CHECK(positive_fmod(370.0, 360.0) == doctest::Approx(10.0));
  CHECK(positive_fmod(0.0, 360.0) == doctest::Approx(0.0));
  CHECK(positive_fmod(-360.0, 360.0) == doctest::Approx(0.0));
  CHECK(positive_fmod(725.0, 360.0) == doctest::Approx(5.0));
}

// ---------------------------------------------------------------- normalize

TEST_CASE("normalize maps bounds onto [-1,1]") {
  CHECK(normalize_value(0.0, 0.0, 360.0) == doctest::Approx(-1.0));
  CHECK(normalize_value(180.0, 0.0, 360.0) == doctest::Approx(0.0));
  CHECK(normalize_value(360.0, 0.0, 360.0) == doctest::Approx(1.0));
  CHECK(normalize_value(90.0, 0.0, 360.0) == doctest::Approx(-0.5));

  NormalizeStats st;
  CHECK(normalize_value(400.0, 0.0, 360.0, &st) == doctest::Approx(1.0));
  CHECK(normalize_value(-10.0, 0.0, 360.0, &st) == doctest::Approx(-1.0));
  CHECK(st.clamped == 2);
}

TEST_CASE("denormalize inverts normalize inside the range") {
  CHECK(denormalize_value(0.0, -100.0, 0.0) == doctest::Approx(-50.0));
  CHECK(denormalize_value(1.0, 10.0, 70.0) == doctest::Approx(70.0));
  CHECK(denormalize_value(-1.0, -150.0, 10.0) == doctest::Approx(-150.0));

  SeededRng r(5);
  for (int i = 0; i < 1000; ++i) {
    const double lo = r.uniform(-200.0, 0.0);
    const double hi = lo + r.uniform(1.0, 400.0);
    const double v = r.uniform(lo, hi);
    CHECK(denormalize_value(normalize_value(v, lo, hi), lo, hi) == doctest::Approx(v).epsilon(1e-9));
  }
}

TEST_CASE("vector normalize handles per-channel bounds and clamping") {
  BoundedSpec spec;
  spec.append(0.0, 360.0).append(-100.0, 100.0).append(0.0, 2000.0);
  NormalizeStats st;
  const std::vector<double> raw = {180.0, -100.0, 3000.0};
  const std::vector<float> out = normalize(raw, spec, &st);
  REQUIRE(out.size() == 3);
  CHECK(out[0] == doctest::Approx(0.0f));
  CHECK(out[1] == doctest::Approx(-1.0f));
  CHECK(out[2] == doctest::Approx(1.0f));  // clamped
  CHECK(st.clamped == 1);

  const std::vector<double> back = denormalize(out, spec);
  CHECK(back[0] == doctest::Approx(180.0));
  CHECK(back[1] == doctest::Approx(-100.0));
  CHECK(back[2] == doctest::Approx(2000.0));
}

TEST_CASE("vector normalize rejects size mismatch") {
  BoundedSpec spec = BoundedSpec::uniform(2, 0.0, 1.0);
  const std::vector<double> raw = {0.5};
  CHECK_THROWS_AS((void)normalize(raw, spec), ShapeMismatchError);
  const std::vector<float> vals = {0.0f};
  CHECK_THROWS_AS((void)denormalize(vals, spec), ShapeMismatchError);
}

// ---------------------------------------------------------------- types

TEST_CASE("tensor shape/data consistency is enforced") {
  CHECK_THROWS_AS(Tensor({2, 2}, {1.0f, 2.0f, 3.0f}), ShapeMismatchError);
  Tensor t = Tensor::zeros({3, 4});
  CHECK(t.numel() == 12);
  t.at(1, 2) = 5.0f;
  CHECK(t.data[1 * 4 + 2] == 5.0f);  // row-major
  Tensor v = Tensor::vec({1.0f, 2.0f});
  CHECK(v.shape == std::vector<int>{2});
}

TEST_CASE("bounded spec builders") {
  BoundedSpec u = BoundedSpec::uniform(3, -1.0, 2.0);
  CHECK(u.size() == 3);
  CHECK(u.low(2) == -1.0);
  CHECK(u.high(0) == 2.0);
  u.append(5.0, 6.0);
  CHECK(u.size() == 4);
  CHECK(u.low(3) == 5.0);
}

TEST_CASE("observation map helpers") {
  ObservationMap m;
  m["vec"] = Tensor::vec({1.0f});
  CHECK_FALSE(obs_has_image(m));
  CHECK(obs_vec(m).data[0] == 1.0f);
  m["image"] = Tensor::zeros({64, 64});
  CHECK(obs_has_image(m));
}

// ---------------------------------------------------------------- replay

namespace {
Transition make_transition(float tag) {
  Transition t;
  t.obs["vec"] = Tensor::vec({tag});
  t.action = {tag};
  t.reward = tag;
  t.next_obs["vec"] = Tensor::vec({tag + 0.5f});
  t.done = false;
  return t;
}
}  // namespace

TEST_CASE("replay buffer is a ring that overwrites the oldest entry") {
  ReplayBuffer buf(4);
  CHECK(buf.capacity() == 4);
  for (int i = 0; i < 6; ++i) buf.push(make_transition(static_cast<float>(i)));
  CHECK(buf.size() == 4);
  // entries 0 and 1 were overwritten by 4 and 5
  std::set<float> tags;
  for (std::size_t i = 0; i < buf.size(); ++i) tags.insert(buf.at(i).reward);
  CHECK(tags == std::set<float>{2.0f, 3.0f, 4.0f, 5.0f});
}

TEST_CASE("replay sampling is uniform with replacement and deterministic") {
  ReplayBuffer buf(100);
  for (int i = 0; i < 50; ++i) buf.push(make_transition(static_cast<float>(i)));

  SeededRng r1(17), r2(17);
  const auto s1 = buf.sample(32, r1);
  const auto s2 = buf.sample(32, r2);
  REQUIRE(s1.size() == 32);
  for (std::size_t i = 0; i < s1.size(); ++i) {
    CHECK(s1[i] == s2[i]);  // same rng, same pointers
    CHECK(s1[i]->reward >= 0.0f);
    CHECK(s1[i]->reward < 50.0f);
  }

  // iid draws: a batch can repeat an entry even when batch == size
  ReplayBuffer tiny(2);
  tiny.push(make_transition(0.0f));
  tiny.push(make_transition(1.0f));
  SeededRng r3(1);
  bool saw_duplicate = false;
  for (int attempt = 0; attempt < 40 && !saw_duplicate; ++attempt) {
    const auto s3 = tiny.sample(2, r3);
    saw_duplicate = s3[0] == s3[1];
  }
  CHECK(saw_duplicate);
}

TEST_CASE("replay sampling rejects an underfilled buffer") {
  ReplayBuffer buf(10);
  buf.push(make_transition(0.0f));
  SeededRng r(0);
  CHECK_THROWS_AS((void)buf.sample(2, r), UnderfilledBufferError);
  CHECK_NOTHROW((void)buf.sample(1, r));
}

// ---------------------------------------------------------------- errors

TEST_CASE("every error derives from the library base error") {
  const auto as_base = [](const Error& e) { return std::string(e.what()); };
  CHECK(as_base(TimeoutError("t")) == "t");
  CHECK(as_base(DisconnectedError("d")) == "d");
  CHECK(as_base(LengthMismatchError("l")) == "l");
  CHECK(as_base(NonFiniteValueError("n")) == "n");
  CHECK(as_base(InvalidCountError("i")) == "i");
  CHECK(as_base(UnderfilledBufferError("u")) == "u");
  CHECK(as_base(ActionOutOfBoundsError("a")) == "a");
  CHECK(as_base(UnknownEnvError("e")) == "e");
  CHECK(as_base(ShapeMismatchError("s")) == "s");
  CHECK(as_base(SpecMismatchError("p")) == "p");
  CHECK(as_base(MissingLogsError("m")) == "m");
  CHECK(as_base(ConfigError("c")) == "c");
  CHECK_THROWS_AS(throw ConfigError("x"), std::runtime_error);
}
