#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <future>
#include <limits>
#include <thread>
#include <vector>

#include "doctest.h"
#include "hubrl/errors.hpp"
#include "hubrl/rng.hpp"
#include "hubrl/wire/frame.hpp"
#include "hubrl/wire/hub.hpp"
#include "hubrl/wire/transport.hpp"

using namespace hubrl;
using namespace hubrl::wire;

// ---------------------------------------------------------------- codec

TEST_CASE("frame encoding is big-endian IEEE-754 float32") {
  // 1.0f = 0x3f800000, -2.5f = 0xc0200000, 100.0f = 0x42c80000
  const std::vector<float> vals = {1.0f, -2.5f, 100.0f};
  const Frame f = encode_frame(vals);
  REQUIRE(f.payload.size() == 12);
  CHECK(f.count() == 3);
  const std::vector<std::uint8_t> want = {0x3f, 0x80, 0x00, 0x00, 0xc0, 0x20,
                                          0x00, 0x00, 0x42, 0xc8, 0x00, 0x00};
  CHECK(f.payload == want);
}

TEST_CASE("frame decoding inverts encoding on golden bytes") {
  const std::vector<std::uint8_t> bytes = {0x3f, 0x80, 0x00, 0x00, 0xc0, 0x20, 0x00, 0x00};
  const std::vector<float> vals = decode_frame(bytes, 2);
  REQUIRE(vals.size() == 2);
  CHECK(vals[0] == 1.0f);
  CHECK(vals[1] == -2.5f);
}

TEST_CASE("codec round-trips 100000 random float32 vectors bit-exactly") {
  SeededRng rng(2024);
  int done = 0;
  while (done < 100000) {
    const std::size_t n = 1 + rng.index(8);
    std::vector<float> vals(n);
    for (auto& v : vals) {
      std::uint32_t bits;
      do {
        bits = static_cast<std::uint32_t>(rng.next_u64());
      } while (((bits >> 23) & 0xffu) == 0xffu);  // skip NaN/inf patterns
      std::memcpy(&v, &bits, 4);
    }
    const Frame f = encode_frame(vals);
    const std::vector<float> back = decode_frame(f.payload, n);
    REQUIRE(back.size() == n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t a, b;
      std::memcpy(&a, &vals[i], 4);
      std::memcpy(&b, &back[i], 4);
      if (a != b) {
        CAPTURE(vals[i]);
        REQUIRE(a == b);
      }
    }
    done += static_cast<int>(n);
  }
}

TEST_CASE("codec preserves signed zero and denormals") {
  const std::vector<float> vals = {-0.0f, std::numeric_limits<float>::denorm_min()};
  const auto back = decode_frame(encode_frame(vals).payload, 2);
  CHECK(std::signbit(back[0]));
  CHECK(back[1] == std::numeric_limits<float>::denorm_min());
}

TEST_CASE("encoding rejects non-finite values without producing bytes") {
  const std::vector<float> bad_nan = {1.0f, std::numeric_limits<float>::quiet_NaN()};
  CHECK_THROWS_AS((void)encode_frame(bad_nan), NonFiniteValueError);
  const std::vector<float> bad_inf = {std::numeric_limits<float>::infinity()};
  CHECK_THROWS_AS((void)encode_frame(bad_inf), NonFiniteValueError);
  const std::vector<float> bad_ninf = {-std::numeric_limits<float>::infinity()};
  CHECK_THROWS_AS((void)encode_frame(bad_ninf), NonFiniteValueError);
}

TEST_CASE("decoding rejects length mismatches") {
  const std::vector<std::uint8_t> five(5, 0);
  CHECK_THROWS_AS((void)decode_frame(five, 1), LengthMismatchError);
  const std::vector<std::uint8_t> four(4, 0);
  CHECK_THROWS_AS((void)decode_frame(four, 2), LengthMismatchError);
  CHECK_NOTHROW((void)decode_frame(four, 1));
}

// ---------------------------------------------------------------- loopback

TEST_CASE("loopback pair carries bytes both ways") {
  auto [a, b] = make_loopback_pair();
  const std::vector<std::uint8_t> msg = {1, 2, 3, 4};
  a->write(msg);
  std::vector<std::uint8_t> got(4);
  b->read_exact(got, 1.0);
  CHECK(got == msg);

  const std::vector<std::uint8_t> reply = {9, 8};
  b->write(reply);
  std::vector<std::uint8_t> got2(2);
  a->read_exact(got2, 1.0);
  CHECK(got2 == reply);
}

TEST_CASE("loopback read assembles partial writes") {
  auto [a, b] = make_loopback_pair();
  std::thread writer([&a] {
    const std::vector<std::uint8_t> p1 = {1, 2};
    const std::vector<std::uint8_t> p2 = {3, 4, 5};
    a->write(p1);
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    a->write(p2);
  });
  std::vector<std::uint8_t> got(5);
  b->read_exact(got, 2.0);
  writer.join();
  CHECK(got == std::vector<std::uint8_t>{1, 2, 3, 4, 5});
}

TEST_CASE("loopback read times out when no data arrives") {
  auto [a, b] = make_loopback_pair();
  std::vector<std::uint8_t> got(1);
  CHECK_THROWS_AS(b->read_exact(got, 0.05), TimeoutError);
  CHECK_FALSE(b->poll(0.05));
  (void)a;
}

TEST_CASE("loopback drains buffered bytes after peer close, then disconnects") {
  auto [a, b] = make_loopback_pair();
  const std::vector<std::uint8_t> msg = {7, 7, 7};
  a->write(msg);
  a->close();
  std::vector<std::uint8_t> got(3);
  b->read_exact(got, 1.0);  // buffered data still readable
  CHECK(got == msg);
  std::vector<std::uint8_t> more(1);
  CHECK_THROWS_AS(b->read_exact(more, 0.2), DisconnectedError);
  CHECK_THROWS_AS((void)b->poll(0.01), DisconnectedError);
}

TEST_CASE("loopback close wakes a blocked reader") {
  auto [a, b] = make_loopback_pair();
  auto fut = std::async(std::launch::async, [&b] {
    std::vector<std::uint8_t> got(1);
    b->read_exact(got, 5.0);
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(30));
  a->close();
  CHECK_THROWS_AS(fut.get(), DisconnectedError);
}

// ---------------------------------------------------------------- fd transport

TEST_CASE("fd transport reads and writes over pipes") {
  int to_peer[2], from_peer[2];
  REQUIRE(pipe(to_peer) == 0);
  REQUIRE(pipe(from_peer) == 0);
  // near end reads from from_peer, writes to to_peer; far end vice versa
  auto near = make_fd_transport(from_peer[0], to_peer[1]);
  auto far = make_fd_transport(to_peer[0], from_peer[1]);

  const std::vector<std::uint8_t> msg = {0xde, 0xad};
  near->write(msg);
  std::vector<std::uint8_t> got(2);
  far->read_exact(got, 1.0);
  CHECK(got == msg);

  far->write(msg);
  near->read_exact(got, 1.0);
  CHECK(got == msg);
}

TEST_CASE("fd transport reports timeout and disconnect") {
  int to_peer[2], from_peer[2];
  REQUIRE(pipe(to_peer) == 0);
  REQUIRE(pipe(from_peer) == 0);
  auto near = make_fd_transport(from_peer[0], to_peer[1]);
  auto far = make_fd_transport(to_peer[0], from_peer[1]);

  std::vector<std::uint8_t> got(1);
  CHECK_THROWS_AS(near->read_exact(got, 0.05), TimeoutError);

  far->close();  // peer gone
  CHECK_THROWS_AS(near->read_exact(got, 0.5), DisconnectedError);
}

// ---------------------------------------------------------------- counting

TEST_CASE("counting transport tallies frames and bytes per direction") {
  auto [a, b] = make_loopback_pair();
  TrafficCounter counter;
  auto counted = make_counting_transport(std::move(a), &counter);

  const std::vector<std::uint8_t> msg4(4, 1);
  const std::vector<std::uint8_t> msg8(8, 2);
  counted->write(msg4);
  counted->write(msg8);
  b->write(msg4);
  std::vector<std::uint8_t> got(4);
  counted->read_exact(got, 1.0);

  CHECK(counter.writes == 2);
  CHECK(counter.write_bytes == 12);
  CHECK(counter.reads == 1);
  CHECK(counter.read_bytes == 4);
}

// ---------------------------------------------------------------- hub loop

namespace {
HubProgram echo_program(std::size_t action_dim, std::size_t state_dim, double delay = 0.0) {
  HubProgram p;
  p.action_dim = action_dim;
  p.state_dim = state_dim;
  p.step_delay_s = delay;
  p.dynamics = [state_dim](std::span<const float> action) {
    std::vector<float> state(state_dim, 0.0f);
    for (std::size_t i = 0; i < action.size() && i < state_dim; ++i) state[i] = action[i] * 2.0f;
    return state;
  };
  return p;
}
}  // namespace

TEST_CASE("hub loop serves one state frame per action frame") {
  auto [env_side, hub_side] = make_loopback_pair();
  auto served = std::async(std::launch::async, [&hub_side] {
    return run_hub_program(echo_program(2, 3), *hub_side);
  });

  const std::vector<float> a1 = {0.5f, -1.0f};
  const std::vector<float> s1 = env_exchange(*env_side, a1, 3);
  REQUIRE(s1.size() == 3);
  CHECK(s1[0] == 1.0f);
  CHECK(s1[1] == -2.0f);
  CHECK(s1[2] == 0.0f);

  const std::vector<float> a2 = {0.0f, 0.25f};
  const std::vector<float> s2 = env_exchange(*env_side, a2, 3);
  CHECK(s2[1] == 0.5f);

  env_side->close();
  CHECK(served.get() == 2);
}

TEST_CASE("hub loop exits cleanly when the env disconnects mid-session") {
  auto [env_side, hub_side] = make_loopback_pair();
  auto served = std::async(std::launch::async, [&hub_side] {
    return run_hub_program(echo_program(1, 1), *hub_side);
  });
  const std::vector<float> a = {1.0f};
  (void)env_exchange(*env_side, a, 1);
  env_side.reset();  // destructor closes
  CHECK(served.get() == 1);
}

TEST_CASE("env exchange times out when no hub is listening") {
  auto [env_side, hub_side] = make_loopback_pair();
  const std::vector<float> a = {0.0f};
  CHECK_THROWS_AS((void)env_exchange(*env_side, a, 1, 0.1), TimeoutError);
  (void)hub_side;
}

TEST_CASE("frequency probe reflects the hub step delay") {
  auto [env_side, hub_side] = make_loopback_pair();
  auto served = std::async(std::launch::async, [&hub_side] {
    return run_hub_program(echo_program(4, 7, 0.02), *hub_side);
  });
  const double hz = measure_frequency(*env_side, 4, 7, 20);
  env_side->close();
  (void)served.get();
  CHECK(hz > 20.0);
  CHECK(hz < 55.0);
}

TEST_CASE("frequency probe rejects a zero exchange count") {
  auto [env_side, hub_side] = make_loopback_pair();
  CHECK_THROWS_AS((void)measure_frequency(*env_side, 1, 1, 0), InvalidCountError);
  (void)hub_side;
}
