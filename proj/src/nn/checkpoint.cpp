#include "big2/nn/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "big2/error.hpp"

namespace big2::nn {
namespace {

constexpr std::array<char, 8> kMagic{'B', 'I', 'G', '2', 'C', 'K', 'P', 'T'};

template <typename U>
void put(std::ostream& out, U value) {
  static_assert(std::is_integral_v<U>);
  using Unsigned = std::make_unsigned_t<U>;
  auto bits = static_cast<Unsigned>(value);
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.put(static_cast<char>(bits & 0xFF));
    bits = static_cast<Unsigned>(bits >> 8);
  }
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void put_floats(std::ostream& out, std::span<const float> values) {
  for (float f : values) put<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
}

template <typename U>
U get(std::istream& in) {
  using Unsigned = std::make_unsigned_t<U>;
  Unsigned bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    const int byte = in.get();
    if (byte == std::char_traits<char>::eof()) throw ConfigError("checkpoint truncated");
    bits = static_cast<Unsigned>(bits | (static_cast<Unsigned>(byte) << (8 * i)));
  }
  return static_cast<U>(bits);
}

std::string get_string(std::istream& in) {
  const auto n = get<std::uint32_t>(in);
  if (n > (1u << 26)) throw ConfigError("checkpoint string too long");
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw ConfigError("checkpoint truncated");
  return s;
}

void get_floats(std::istream& in, std::span<float> values) {
  for (float& f : values) f = std::bit_cast<float>(get<std::uint32_t>(in));
}

}  // namespace

NetworkConfig parse_canonical_config(const std::string& canonical) {
  std::map<std::string, int> fields;
  std::istringstream in(canonical);
  std::string item;
  while (std::getline(in, item, ';')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("bad network config string");
    fields[item.substr(0, eq)] = std::stoi(item.substr(eq + 1));
  }
  auto take = [&](const char* key) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError(std::string("network config missing ") + key);
    return it->second;
  };
  NetworkConfig c;
  c.d_emb = take("d_emb");
  c.heads = take("heads");
  c.attention_layers = take("attention_layers");
  c.d_set = take("d_set");
  c.d_misc = take("d_misc");
  c.d_state = take("d_state");
  c.d_ff = take("d_ff");
  c.d_act = take("d_act");
  c.d_action_hidden = take("d_action_hidden");
  c.d_value = take("d_value");
  c.value_head = take("value_head") != 0;
  if (c.canonical() != canonical) throw ConfigError("unrecognized network config string");
  return c;
}

void save_checkpoint(const std::string& path, const Parameters<float>& params,
                     const Adam* optimizer, const std::string& metadata) {
  assert_finite(std::span<const float>(params.values), "checkpoint parameters");
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write checkpoint " + path);
    out.write(kMagic.data(), kMagic.size());
    put<std::uint32_t>(out, kCheckpointVersion);
    put<std::uint64_t>(out, params.config().hash());
    put_string(out, params.config().canonical());
    const auto& tensors = params.layout->tensors();
    put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
    for (const TensorSpec& t : tensors) {
      put_string(out, t.name);
      put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rows));
      put<std::uint32_t>(out, static_cast<std::uint32_t>(t.cols));
    }
    put<std::uint8_t>(out, optimizer ? 1 : 0);
    put<std::int64_t>(out, optimizer ? optimizer->steps() : 0);
    put_string(out, metadata);
    put_floats(out, params.values);
    if (optimizer) {
      put_floats(out, optimizer->first_moment());
      put_floats(out, optimizer->second_moment());
    }
    if (!out) throw ConfigError("failed writing checkpoint " + path);
  }
  std::rename(tmp.c_str(), path.c_str());
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint " + path);
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ConfigError("not a checkpoint: " + path);
  const auto version = get<std::uint32_t>(in);
  if (version != kCheckpointVersion)
    throw ConfigError("unsupported checkpoint version " + std::to_string(version));
  const auto hash = get<std::uint64_t>(in);
  const NetworkConfig config = parse_canonical_config(get_string(in));
  if (config.hash() != hash) throw ConfigError("checkpoint config hash mismatch");

  Checkpoint ckpt;
  ckpt.params = Parameters<float>(config);
  const auto& tensors = ckpt.params.layout->tensors();
  const auto count = get<std::uint32_t>(in);
  if (count != tensors.size()) throw ConfigError("checkpoint tensor count mismatch");
  for (const TensorSpec& t : tensors) {
    const std::string name = get_string(in);
    const auto rows = get<std::uint32_t>(in);
    const auto cols = get<std::uint32_t>(in);
    if (name != t.name || rows != static_cast<std::uint32_t>(t.rows) ||
        cols != static_cast<std::uint32_t>(t.cols))
      throw ConfigError("checkpoint tensor layout mismatch at " + name);
  }
  const bool has_optimizer = get<std::uint8_t>(in) != 0;
  const auto steps = get<std::int64_t>(in);
  ckpt.metadata = get_string(in);
  get_floats(in, ckpt.params.values);
  if (has_optimizer) {
    std::vector<float> m(ckpt.params.size());
    std::vector<float> v(ckpt.params.size());
    get_floats(in, m);
    get_floats(in, v);
    Adam adam(ckpt.params.size());
    adam.restore(steps, std::move(m), std::move(v));
    ckpt.optimizer = std::move(adam);
  }
  assert_finite(std::span<const float>(ckpt.params.values), "loaded checkpoint");
  return ckpt;
}

Checkpoint load_checkpoint(const std::string& path, const NetworkConfig& expected) {
  Checkpoint ckpt = load_checkpoint(path);
  if (!(ckpt.params.config() == expected))
    throw ConfigError("checkpoint network config differs from the run config");
  return ckpt;
}

}  // namespace big2::nn
