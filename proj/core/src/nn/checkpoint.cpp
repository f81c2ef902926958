#include "hubrl/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "hubrl/errors.hpp"

namespace hubrl::nn {
namespace {

constexpr char kMagic[8] = {'H', 'R', 'L', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error("checkpoint: truncated file");
  return v;
}

}  // namespace

void write_checkpoint(const std::string& path, const std::vector<NamedArray>& arrays) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("checkpoint: cannot open for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(arrays.size()));
  for (const auto& a : arrays) {
    std::size_t numel = 1;
    for (auto d : a.dims) numel *= d;
    if (numel != a.data.size()) throw ShapeMismatchError("checkpoint: dims/data mismatch: " + a.name);
    put<std::uint16_t>(out, static_cast<std::uint16_t>(a.name.size()));
    out.write(a.name.data(), static_cast<std::streamsize>(a.name.size()));
    put<std::uint8_t>(out, static_cast<std::uint8_t>(a.dims.size()));
    for (auto d : a.dims) put<std::uint32_t>(out, d);
    out.write(reinterpret_cast<const char*>(a.data.data()),
              static_cast<std::streamsize>(a.data.size() * sizeof(float)));
  }
  if (!out) throw Error("checkpoint: write failed: " + path);
}

std::vector<NamedArray> read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("checkpoint: cannot open: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw SpecMismatchError("checkpoint: bad magic in " + path);
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion)
    throw SpecMismatchError("checkpoint: unsupported version " + std::to_string(version));
  const auto count = get<std::uint32_t>(in);
  std::vector<NamedArray> arrays;
  arrays.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedArray a;
    const auto name_len = get<std::uint16_t>(in);
    a.name.resize(name_len);
    in.read(a.name.data(), name_len);
    const auto ndim = get<std::uint8_t>(in);
    std::size_t numel = 1;
    for (int d = 0; d < ndim; ++d) {
      a.dims.push_back(get<std::uint32_t>(in));
      numel *= a.dims.back();
    }
    a.data.resize(numel);
    in.read(reinterpret_cast<char*>(a.data.data()),
            static_cast<std::streamsize>(numel * sizeof(float)));
    if (!in) throw Error("checkpoint: truncated file: " + path);
    arrays.push_back(std::move(a));
  }
  return arrays;
}

const NamedArray& find_array(const std::vector<NamedArray>& arrays, const std::string& name) {
  for (const auto& a : arrays)
    if (a.name == name) return a;
  throw SpecMismatchError("checkpoint: missing array: " + name);
}

bool has_array(const std::vector<NamedArray>& arrays, const std::string& name) {
  for (const auto& a : arrays)
    if (a.name == name) return true;
  return false;
}

}  // namespace hubrl::nn
