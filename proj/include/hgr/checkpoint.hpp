#pragma once

// Model checkpoint, text format "DLSTM-CKPT v1":
//
//   DLSTM-CKPT v1
//   dims <D> <H> <N> <K>
//   init_seed <u64>
//   meta <key> <value>          zero or more, value runs to end of line
//   tensors <count>
//   tensor <name> <rows> <cols>
//   <row 0: cols hex-float values separated by single spaces>
//   ...                         (rows lines, row-major)
//   end
//
// Values are written in C hex-float notation without the 0x prefix
// (std::chars_format::hex), so load(save(m)) is bit-exact. Tensors appear in
// DlstmModel::for_each_tensor order and are matched by name on load.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <system_error>

#include "hgr/error.hpp"
#include "hgr/network.hpp"

namespace hgr {

inline constexpr const char* kCheckpointMagic = "DLSTM-CKPT v1";

struct Checkpoint {
  DlstmModel model;
  std::map<std::string, std::string> meta;
};

inline std::string format_hexfloat(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::hex);
  return std::string(buf, res.ptr);
}

inline double parse_hexfloat(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::hex);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorKind::BadHeader, "bad number '" + std::string(s) + "' in checkpoint");
  }
  return v;
}

inline std::string serialize_checkpoint(const DlstmModel& model,
                                        const std::map<std::string, std::string>& meta = {}) {
  std::ostringstream os;
  const ModelDims& d = model.dims();
  os << kCheckpointMagic << '\n';
  os << "dims " << d.input << ' ' << d.hidden << ' ' << d.layers << ' ' << d.classes << '\n';
  os << "init_seed " << model.init_seed() << '\n';
  for (const auto& [k, v] : meta) os << "meta " << k << ' ' << v << '\n';
  std::size_t count = 0;
  model.for_each_tensor([&](const std::string&, const auto&) { ++count; });
  os << "tensors " << count << '\n';
  model.for_each_tensor([&](const std::string& name, const auto& t) {
    os << "tensor " << name << ' ' << t.rows() << ' ' << t.cols() << '\n';
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) {
        if (c > 0) os << ' ';
        os << format_hexfloat(t(r, c));
      }
      os << '\n';
    }
  });
  os << "end\n";
  return os.str();
}

inline Checkpoint deserialize_checkpoint(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  auto next = [&](const char* what) {
    if (!std::getline(is, line)) throw Error(ErrorKind::BadHeader, std::string("missing ") + what);
    return line;
  };
  if (next("magic") != kCheckpointMagic) {
    throw Error(ErrorKind::BadHeader, "expected '" + std::string(kCheckpointMagic) + "', got '" +
                                          line + "'");
  }
  ModelDims dims;
  {
    std::istringstream ls(next("dims"));
    std::string tag;
    if (!(ls >> tag >> dims.input >> dims.hidden >> dims.layers >> dims.classes) || tag != "dims") {
      throw Error(ErrorKind::BadHeader, "bad dims line '" + line + "'");
    }
  }
  std::uint64_t seed = 0;
  {
    std::istringstream ls(next("init_seed"));
    std::string tag;
    if (!(ls >> tag >> seed) || tag != "init_seed") {
      throw Error(ErrorKind::BadHeader, "bad init_seed line '" + line + "'");
    }
  }
  Checkpoint ck;
  ck.model = DlstmModel::zeros(dims);
  ck.model.set_init_seed(seed);
  std::size_t count = 0;
  while (true) {
    next("tensors");
    if (line.rfind("meta ", 0) == 0) {
      const std::size_t sp = line.find(' ', 5);
      if (sp == std::string::npos) throw Error(ErrorKind::BadHeader, "bad meta line '" + line + "'");
      ck.meta[line.substr(5, sp - 5)] = line.substr(sp + 1);
      continue;
    }
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag >> count) || tag != "tensors") {
      throw Error(ErrorKind::BadHeader, "bad tensors line '" + line + "'");
    }
    break;
  }
  std::map<std::string, std::pair<Eigen::Index, Eigen::Index>> shapes;
  std::map<std::string, std::vector<double>> values;
  for (std::size_t n = 0; n < count; ++n) {
    std::istringstream ls(next("tensor"));
    std::string tag, name;
    Eigen::Index rows = 0, cols = 0;
    if (!(ls >> tag >> name >> rows >> cols) || tag != "tensor" || rows < 0 || cols < 0) {
      throw Error(ErrorKind::BadHeader, "bad tensor line '" + line + "'");
    }
    auto& vals = values[name];
    shapes[name] = {rows, cols};
    for (Eigen::Index r = 0; r < rows; ++r) {
      std::istringstream rs(next("tensor row"));
      std::string tok;
      Eigen::Index c = 0;
      while (rs >> tok) {
        vals.push_back(parse_hexfloat(tok));
        ++c;
      }
      if (c != cols) throw Error(ErrorKind::BadHeader, "row width mismatch in " + name);
    }
  }
  if (next("end") != "end") throw Error(ErrorKind::BadHeader, "missing end marker");

  std::size_t matched = 0;
  ck.model.for_each_tensor([&](const std::string& name, auto& t) {
    const auto it = shapes.find(name);
    if (it == shapes.end()) throw Error(ErrorKind::BadHeader, "missing tensor " + name);
    if (it->second.first != t.rows() || it->second.second != t.cols()) {
      throw Error(ErrorKind::DimMismatch, "tensor " + name + " shape disagrees with dims");
    }
    const auto& vals = values[name];
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) {
        t(r, c) = vals[static_cast<std::size_t>(r * t.cols() + c)];
      }
    }
    ++matched;
  });
  if (matched != shapes.size()) throw Error(ErrorKind::BadHeader, "unexpected extra tensors");
  return ck;
}

inline void save_checkpoint(const std::string& path, const DlstmModel& model,
                            const std::map<std::string, std::string>& meta = {}) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << serialize_checkpoint(model, meta);
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_checkpoint(ss.str());
}

}  // namespace hgr
