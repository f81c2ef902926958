#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hubrl::nn {

struct NamedArray {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> data;  // row-major per dims
};

// Binary container for model snapshots: 8-byte magic "HRLCKPT1", u32 format
// version, u32 array count, then per array a length-prefixed name, dim list,
// and raw float32 payload. All integers and floats little-endian; arrays are
// written in the order given, so byte-identical inputs give byte-identical
// files.
void write_checkpoint(const std::string& path, const std::vector<NamedArray>& arrays);
std::vector<NamedArray> read_checkpoint(const std::string& path);

// convenience: find by exact name (throws SpecMismatchError when missing)
const NamedArray& find_array(const std::vector<NamedArray>& arrays, const std::string& name);
bool has_array(const std::vector<NamedArray>& arrays, const std::string& name);

}  // namespace hubrl::nn
