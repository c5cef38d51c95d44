#include "refgame/nnkit/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

#include "refgame/errors.hpp"

namespace rg::nn {

namespace {

constexpr char kMagic[4] = {'R', 'G', 'T', 'M'};

void write_u32(std::ostream& os, std::uint32_t x) {
  os.write(reinterpret_cast<const char*>(&x), sizeof(x));
}

std::uint32_t read_u32(std::istream& is) {
  std::uint32_t x = 0;
  is.read(reinterpret_cast<char*>(&x), sizeof(x));
  if (!is) throw ConfigError("checkpoint: truncated file");
  return x;
}

std::string read_string(std::istream& is) {
  const std::uint32_t n = read_u32(is);
  if (n > (1u << 20)) throw ConfigError("checkpoint: implausible string length");
  std::string s(n, '\0');
  is.read(s.data(), n);
  if (!is) throw ConfigError("checkpoint: truncated file");
  return s;
}

CheckpointMeta read_header(std::istream& is, const std::string& path) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw ConfigError("checkpoint: bad magic in " + path);
  }
  CheckpointMeta meta;
  meta.version = read_u32(is);
  if (meta.version != kCheckpointVersion) {
    throw ConfigError("checkpoint: unsupported version in " + path);
  }
  meta.role = read_string(is);
  return meta;
}

}  // namespace

void save_checkpoint(const ParamStore& params, const std::string& path, std::string_view role) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw TrainingError("checkpoint: cannot open " + tmp + " for writing");
    os.write(kMagic, 4);
    write_u32(os, kCheckpointVersion);
    write_u32(os, static_cast<std::uint32_t>(role.size()));
    os.write(role.data(), static_cast<std::streamsize>(role.size()));
    write_u32(os, static_cast<std::uint32_t>(params.tensor_count()));
    std::vector<float> buf;
    for (const auto& [name, t] : params.items()) {
      write_u32(os, static_cast<std::uint32_t>(name.size()));
      os.write(name.data(), static_cast<std::streamsize>(name.size()));
      write_u32(os, static_cast<std::uint32_t>(t.shape.size()));
      for (std::uint32_t d : t.shape) write_u32(os, d);
      buf.resize(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) buf[i] = static_cast<float>(t.v[i]);
      os.write(reinterpret_cast<const char*>(buf.data()),
               static_cast<std::streamsize>(buf.size() * sizeof(float)));
    }
    if (!os) throw TrainingError("checkpoint: write failure on " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw TrainingError("checkpoint: cannot move " + tmp + " into place");
  }
}

CheckpointMeta load_checkpoint(ParamStore& params, const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("checkpoint: cannot open " + path);
  const CheckpointMeta meta = read_header(is, path);
  const std::uint32_t n_records = read_u32(is);
  if (n_records != params.tensor_count()) {
    throw ConfigError("checkpoint: record count mismatch in " + path);
  }
  std::vector<float> buf;
  for (std::uint32_t r = 0; r < n_records; ++r) {
    const std::string name = read_string(is);
    if (!params.contains(name)) {
      throw ConfigError("checkpoint: unexpected parameter '" + name + "' in " + path);
    }
    Tensor& t = params.at(name);
    const std::uint32_t rank = read_u32(is);
    std::vector<std::uint32_t> dims(rank);
    for (auto& d : dims) d = read_u32(is);
    if (dims != t.shape) {
      throw ConfigError("checkpoint: shape mismatch for '" + name + "' in " + path);
    }
    buf.resize(t.size());
    is.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!is) throw ConfigError("checkpoint: truncated data in " + path);
    for (std::size_t i = 0; i < t.size(); ++i) t.v[i] = static_cast<double>(buf[i]);
  }
  return meta;
}

CheckpointMeta read_checkpoint_meta(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("checkpoint: cannot open " + path);
  return read_header(is, path);
}

std::uint64_t file_fingerprint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("fingerprint: cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[8192];
  while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
    const std::streamsize n = is.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

}  // namespace rg::nn
