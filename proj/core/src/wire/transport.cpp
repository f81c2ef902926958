#include "hubrl/wire/transport.hpp"

#include <poll.h>
#include <signal.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

#include "hubrl/errors.hpp"

namespace hubrl::wire {

namespace {

using Clock = std::chrono::steady_clock;

Clock::time_point deadline_from(double timeout_s) {
  return Clock::now() + std::chrono::duration_cast<Clock::duration>(
                            std::chrono::duration<double>(timeout_s));
}

// ---------------------------------------------------------------- loopback

struct LoopbackState {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::uint8_t> queue[2];  // [0]: a->b, [1]: b->a
  bool closed = false;                // either endpoint closed
};

class LoopbackTransport final : public Transport {
 public:
  LoopbackTransport(std::shared_ptr<LoopbackState> st, int side) : st_(std::move(st)), side_(side) {}
  ~LoopbackTransport() override { close(); }

  void write(std::span<const std::uint8_t> bytes) override {
    std::lock_guard lock(st_->mu);
    if (st_->closed) throw DisconnectedError("loopback transport is closed");
    auto& q = st_->queue[side_];  // we write onto our outgoing queue
    q.insert(q.end(), bytes.begin(), bytes.end());
    st_->cv.notify_all();
  }

  void read_exact(std::span<std::uint8_t> into, double timeout_s) override {
    const auto deadline = deadline_from(timeout_s);
    std::unique_lock lock(st_->mu);
    auto& q = st_->queue[1 - side_];  // we read the peer's outgoing queue
    std::size_t got = 0;
    while (got < into.size()) {
      if (!q.empty()) {
        const std::size_t take = std::min(into.size() - got, q.size());
        for (std::size_t i = 0; i < take; ++i) {
          into[got++] = q.front();
          q.pop_front();
        }
        continue;
      }
      if (st_->closed) throw DisconnectedError("peer closed the loopback transport");
      if (st_->cv.wait_until(lock, deadline) == std::cv_status::timeout && q.empty())
        throw TimeoutError("read timed out after " + std::to_string(timeout_s) + "s");
    }
  }

  bool poll(double timeout_s) override {
    const auto deadline = deadline_from(timeout_s);
    std::unique_lock lock(st_->mu);
    auto& q = st_->queue[1 - side_];
    while (q.empty()) {
      if (st_->closed) throw DisconnectedError("peer closed the loopback transport");
      if (st_->cv.wait_until(lock, deadline) == std::cv_status::timeout) return !q.empty();
    }
    return true;
  }

  void close() override {
    std::lock_guard lock(st_->mu);
    st_->closed = true;
    st_->cv.notify_all();
  }

 private:
  std::shared_ptr<LoopbackState> st_;
  int side_;
};

// ---------------------------------------------------------------- fd pair

class FdTransport final : public Transport {
 public:
  FdTransport(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {
    // A dead peer must surface as DisconnectedError, not a fatal SIGPIPE.
    ::signal(SIGPIPE, SIG_IGN);
  }
  ~FdTransport() override { close(); }

  void write(std::span<const std::uint8_t> bytes) override {
    std::size_t sent = 0;
    while (sent < bytes.size()) {
      const ssize_t n = ::write(write_fd_, bytes.data() + sent, bytes.size() - sent);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw DisconnectedError(std::string("write failed: ") + std::strerror(errno));
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  void read_exact(std::span<std::uint8_t> into, double timeout_s) override {
    const auto deadline = deadline_from(timeout_s);
    std::size_t got = 0;
    while (got < into.size()) {
      wait_readable(deadline, timeout_s);
      const ssize_t n = ::read(read_fd_, into.data() + got, into.size() - got);
      if (n == 0) throw DisconnectedError("peer closed the stream");
      if (n < 0) {
        if (errno == EINTR) continue;
        throw DisconnectedError(std::string("read failed: ") + std::strerror(errno));
      }
      got += static_cast<std::size_t>(n);
    }
  }

  bool poll(double timeout_s) override {
    struct pollfd p = {read_fd_, POLLIN, 0};
    const int ms = static_cast<int>(timeout_s * 1000.0);
    const int r = ::poll(&p, 1, ms < 0 ? 0 : ms);
    if (r < 0) {
      if (errno == EINTR) return false;
      throw DisconnectedError(std::string("poll failed: ") + std::strerror(errno));
    }
    if (r == 0) return false;
    if (p.revents & POLLIN) return true;
    // HUP/ERR with no data left
    throw DisconnectedError("peer closed the stream");
  }

  void close() override {
    if (read_fd_ >= 0) ::close(read_fd_);
    if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
    read_fd_ = write_fd_ = -1;
  }

 private:
  void wait_readable(Clock::time_point deadline, double timeout_s) {
    for (;;) {
      const auto left =
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
      if (left.count() <= 0)
        throw TimeoutError("read timed out after " + std::to_string(timeout_s) + "s");
      struct pollfd p = {read_fd_, POLLIN, 0};
      const int r = ::poll(&p, 1, static_cast<int>(left.count()));
      if (r < 0) {
        if (errno == EINTR) continue;
        throw DisconnectedError(std::string("poll failed: ") + std::strerror(errno));
      }
      if (r > 0) return;  // readable or HUP; read() will sort it out
    }
  }

  int read_fd_;
  int write_fd_;
};

// ---------------------------------------------------------------- counting

class CountingTransport final : public Transport {
 public:
  CountingTransport(std::unique_ptr<Transport> inner, TrafficCounter* counter)
      : inner_(std::move(inner)), counter_(counter) {}

  void write(std::span<const std::uint8_t> bytes) override {
    inner_->write(bytes);
    ++counter_->writes;
    counter_->write_bytes += static_cast<long>(bytes.size());
  }

  void read_exact(std::span<std::uint8_t> into, double timeout_s) override {
    inner_->read_exact(into, timeout_s);
    ++counter_->reads;
    counter_->read_bytes += static_cast<long>(into.size());
  }

  bool poll(double timeout_s) override { return inner_->poll(timeout_s); }
  void close() override { inner_->close(); }

 private:
  std::unique_ptr<Transport> inner_;
  TrafficCounter* counter_;
};

}  // namespace

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_loopback_pair() {
  auto st = std::make_shared<LoopbackState>();
  return {std::make_unique<LoopbackTransport>(st, 0), std::make_unique<LoopbackTransport>(st, 1)};
}

std::unique_ptr<Transport> make_fd_transport(int read_fd, int write_fd) {
  return std::make_unique<FdTransport>(read_fd, write_fd);
}

std::unique_ptr<Transport> make_counting_transport(std::unique_ptr<Transport> inner,
                                                   TrafficCounter* counter) {
  return std::make_unique<CountingTransport>(std::move(inner), counter);
}

}  // namespace hubrl::wire
