#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>

namespace hubrl::wire {

// Bidirectional byte stream between the env side and the hub side.
// Implementations: in-process loopback (tests, in-process mock hubs) and a
// pipe/fd pair (subprocess hubs; a real serial link would slot in the same
// way). All reads are exact-length: read_exact either fills the span or
// throws (TimeoutError after `timeout_s`, DisconnectedError when the peer
// is gone and the stream is drained).
class Transport {
 public:
  virtual ~Transport() = default;

  virtual void write(std::span<const std::uint8_t> bytes) = 0;
  virtual void read_exact(std::span<std::uint8_t> into, double timeout_s) = 0;

  // True when at least one byte is readable. Returns false on timeout.
  // Throws DisconnectedError when the peer closed and nothing is buffered.
  virtual bool poll(double timeout_s) = 0;

  virtual void close() = 0;
};

// Connected pair of in-process endpoints: bytes written to one side become
// readable on the other. Thread-safe; closing either side wakes blocked
// readers on both.
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_loopback_pair();

// Transport over OS file descriptors (e.g. pipes to a hub subprocess).
// Takes ownership of both fds; close() closes them.
std::unique_ptr<Transport> make_fd_transport(int read_fd, int write_fd);

// Wrapper that counts frames and bytes in each direction; used to audit
// protocol traffic without touching the underlying stream.
struct TrafficCounter {
  long writes = 0;
  long write_bytes = 0;
  long reads = 0;
  long read_bytes = 0;
};

std::unique_ptr<Transport> make_counting_transport(std::unique_ptr<Transport> inner,
                                                   TrafficCounter* counter);

}  // namespace hubrl::wire
