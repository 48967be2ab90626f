#include "io.hpp"

#include "error.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace anvar {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

namespace {

std::string component_name(Index j, Index d) {
  if (d == 3) return std::array<std::string, 3>{"x", "y", "z"}[static_cast<std::size_t>(j)];
  return "c" + std::to_string(j);
}

std::ofstream open_out(const std::string& path) {
  if (const fs::path parent = fs::path(path).parent_path(); !parent.empty())
    fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw IoError("cannot parse number '" + s + "' in " + where);
  return v;
}

} // namespace

void save_series_csv(const TimeSeries& series, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "t";
  for (Index j = 0; j < series.dim(); ++j) out << "," << component_name(j, series.dim());
  out << "\n";
  for (Index i = 0; i < series.rows(); ++i) {
    out << fmt_full(series.time_at(i));
    for (Index j = 0; j < series.dim(); ++j) out << "," << fmt_full(series.data(i, j));
    out << "\n";
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

TimeSeries load_series_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty trajectory file '" + path + "'");
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "t")
    throw IoError("'" + path + "' is not a trajectory CSV (expected header t,...)");
  const Index d = static_cast<Index>(header.size()) - 1;

  std::vector<double> times;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (static_cast<Index>(fields.size()) != d + 1)
      throw IoError("row with " + std::to_string(fields.size()) + " fields in '" + path + "'");
    times.push_back(parse_double(fields[0], path));
    for (Index j = 0; j < d; ++j)
      values.push_back(parse_double(fields[static_cast<std::size_t>(j) + 1], path));
  }
  if (times.empty()) throw IoError("trajectory file '" + path + "' has no rows");

  TimeSeries series;
  const Index rows = static_cast<Index>(times.size());
  series.data = Eigen::Map<const Mat>(values.data(), rows, d);
  series.t0 = times.front();
  series.dt = rows > 1 ? (times.back() - times.front()) / static_cast<double>(rows - 1) : 1.0;
  return series;
}

void save_grid_report_csv(const GridSearchReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "k,gamma,val_rmse\n";
  for (const auto& c : report.candidates)
    out << c.k << "," << fmt_full(c.gamma) << "," << fmt_full(c.val_rmse) << "\n";
  if (!out) throw IoError("write failed for '" + path + "'");
}

void save_results_csv(const std::vector<ExperimentResult>& results, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "model,noise,seed,horizon,component,rmse\n";
  for (const auto& r : results) {
    if (r.failed) {
      out << r.model << "," << fmt_label(r.noise) << "," << r.seed << "," << r.horizon
          << ",all,failed\n";
      continue;
    }
    const Index d = r.per_component_rmse.size();
    for (Index j = 0; j < d; ++j)
      out << r.model << "," << fmt_label(r.noise) << "," << r.seed << "," << r.horizon << ","
          << component_name(j, d) << "," << fmt_full(r.per_component_rmse[j]) << "\n";
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

void save_aggregate_csv(const std::vector<AggregateRow>& table, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "model,noise,horizon,component,mean,std\n";
  for (const auto& row : table) {
    const Index d = row.mean.size();
    for (Index j = 0; j < d; ++j)
      out << row.model << "," << fmt_label(row.noise) << "," << row.horizon << ","
          << component_name(j, d) << "," << fmt_full(row.mean[j]) << ","
          << fmt_full(row.stddev[j]) << "\n";
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<AggregateRow> load_aggregate_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != "model,noise,horizon,component,mean,std")
    throw IoError("'" + path + "' is not an aggregate CSV");

  // (model, noise, horizon) -> component rows, preserving file order.
  std::vector<AggregateRow> table;
  auto find_row = [&](const std::string& model, double noise, Index horizon) -> AggregateRow& {
    for (auto& row : table)
      if (row.model == model && row.noise == noise && row.horizon == horizon) return row;
    table.push_back({model, noise, horizon, Vec(0), Vec(0), 0, 0});
    return table.back();
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) throw IoError("bad aggregate row in '" + path + "'");
    AggregateRow& row = find_row(f[0], parse_double(f[1], path),
                                 static_cast<Index>(parse_double(f[2], path)));
    const Index d = row.mean.size();
    row.mean.conservativeResize(d + 1);
    row.stddev.conservativeResize(d + 1);
    row.mean[d] = parse_double(f[4], path);
    row.stddev[d] = parse_double(f[5], path);
  }
  return table;
}

void save_trace_csv(const std::vector<TraceRow>& trace, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "phase,iter,loss\n";
  for (const auto& row : trace)
    out << row.phase << "," << row.iter << "," << fmt_full(row.loss) << "\n";
  if (!out) throw IoError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr char kMagic[8] = {'A', 'N', 'V', 'A', 'R', 'C', 'K', '1'};

struct NamedTensor {
  std::string name;
  Mat value; // vectors stored as 1 x n
};

void write_checkpoint(const std::string& path, const std::vector<NamedTensor>& tensors,
                      const json& sidecar) {
  std::ofstream out = open_out(path);
  out.write(kMagic, sizeof kMagic);
  const std::uint32_t count = static_cast<std::uint32_t>(tensors.size());
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  for (const auto& t : tensors) {
    const std::uint32_t name_len = static_cast<std::uint32_t>(t.name.size());
    out.write(reinterpret_cast<const char*>(&name_len), sizeof name_len);
    out.write(t.name.data(), name_len);
    const std::uint32_t rank = 2;
    out.write(reinterpret_cast<const char*>(&rank), sizeof rank);
    const std::uint64_t dims[2] = {static_cast<std::uint64_t>(t.value.rows()),
                                   static_cast<std::uint64_t>(t.value.cols())};
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    out.write(reinterpret_cast<const char*>(t.value.data()),
              static_cast<std::streamsize>(sizeof(double)) * t.value.size());
  }
  if (!out) throw IoError("write failed for '" + path + "'");

  std::ofstream side = open_out(path + ".json");
  side << sidecar.dump(2) << "\n";
  if (!side) throw IoError("write failed for '" + path + ".json'");
}

std::map<std::string, Mat> read_checkpoint(const std::string& path) {
  std::ifstream in = open_in(path);
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw IoError("'" + path + "' is not a checkpoint file");
  std::uint32_t count = 0;
  in.read(reinterpret_cast<char*>(&count), sizeof count);
  std::map<std::string, Mat> tensors;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t name_len = 0;
    in.read(reinterpret_cast<char*>(&name_len), sizeof name_len);
    if (!in || name_len > 4096) throw IoError("corrupt checkpoint '" + path + "'");
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    std::uint32_t rank = 0;
    in.read(reinterpret_cast<char*>(&rank), sizeof rank);
    if (!in || rank != 2) throw IoError("corrupt checkpoint '" + path + "'");
    std::uint64_t dims[2] = {0, 0};
    in.read(reinterpret_cast<char*>(dims), sizeof dims);
    if (!in || dims[0] > (1u << 24) || dims[1] > (1u << 24))
      throw IoError("corrupt checkpoint '" + path + "'");
    Mat value(static_cast<Index>(dims[0]), static_cast<Index>(dims[1]));
    in.read(reinterpret_cast<char*>(value.data()),
            static_cast<std::streamsize>(sizeof(double)) * value.size());
    if (!in) throw IoError("truncated checkpoint '" + path + "'");
    tensors.emplace(std::move(name), std::move(value));
  }
  return tensors;
}

json read_sidecar(const std::string& path) {
  std::ifstream in = open_in(path + ".json");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw IoError("bad checkpoint sidecar '" + path + ".json': " + e.what());
  }
  return doc;
}

Mat require_tensor(std::map<std::string, Mat>& tensors, const std::string& name,
                   const std::string& path) {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw IoError("checkpoint '" + path + "' lacks tensor " + name);
  return std::move(it->second);
}

} // namespace

void save_adaptive_model(const AdaptiveNvarModel& model, const std::string& path) {
  json sidecar;
  sidecar["format"] = "anvar-checkpoint-v1";
  sidecar["model"] = "adaptive";
  sidecar["byte_order"] = "little";
  sidecar["spec"] = {{"k", model.spec.k}, {"s", model.spec.s}, {"d", model.spec.d}};
  sidecar["dropout"] = model.mlp.dropout_rate;
  sidecar["hidden"] = model.mlp.hidden_dim();
  sidecar["m"] = model.mlp.output_dim();
  sidecar["shapes"] = {{"w_in", {model.mlp.w_in.rows(), model.mlp.w_in.cols()}},
                       {"b1", {1, model.mlp.b1.size()}},
                       {"w", {model.mlp.w.rows(), model.mlp.w.cols()}},
                       {"b2", {1, model.mlp.b2.size()}},
                       {"w_out", {model.w_out.rows(), model.w_out.cols()}}};
  write_checkpoint(path,
                   {{"w_in", model.mlp.w_in},
                    {"b1", model.mlp.b1.transpose()},
                    {"w", model.mlp.w},
                    {"b2", model.mlp.b2.transpose()},
                    {"w_out", model.w_out}},
                   sidecar);
}

AdaptiveNvarModel load_adaptive_model(const std::string& path) {
  const json side = read_sidecar(path);
  if (side.value("model", "") != "adaptive")
    throw IoError("'" + path + "' is not an adaptive model checkpoint");
  auto tensors = read_checkpoint(path);
  AdaptiveNvarModel model;
  model.spec = {side.at("spec").at("k").get<Index>(), side.at("spec").at("s").get<Index>(),
                side.at("spec").at("d").get<Index>()};
  model.mlp.w_in = require_tensor(tensors, "w_in", path);
  model.mlp.b1 = require_tensor(tensors, "b1", path).row(0).transpose();
  model.mlp.w = require_tensor(tensors, "w", path);
  model.mlp.b2 = require_tensor(tensors, "b2", path).row(0).transpose();
  model.mlp.dropout_rate = side.at("dropout").get<double>();
  model.w_out = require_tensor(tensors, "w_out", path);
  model.mlp.validate();
  if (model.w_out.cols() != model.feature_dim() || model.w_out.rows() != model.spec.d)
    throw IoError("checkpoint '" + path + "' has inconsistent readout shape");
  return model;
}

void save_standard_model(const StandardNvarModel& model, const std::string& path) {
  json sidecar;
  sidecar["format"] = "anvar-checkpoint-v1";
  sidecar["model"] = "standard";
  sidecar["byte_order"] = "little";
  sidecar["spec"] = {{"k", model.spec.k}, {"s", model.spec.s}, {"d", model.spec.d}};
  sidecar["gamma"] = model.gamma;
  sidecar["bias"] = model.bias;
  sidecar["shapes"] = {{"w_out", {model.w_out.rows(), model.w_out.cols()}}};
  write_checkpoint(path, {{"w_out", model.w_out}}, sidecar);
}

StandardNvarModel load_standard_model(const std::string& path) {
  const json side = read_sidecar(path);
  if (side.value("model", "") != "standard")
    throw IoError("'" + path + "' is not a standard model checkpoint");
  auto tensors = read_checkpoint(path);
  StandardNvarModel model;
  model.spec = {side.at("spec").at("k").get<Index>(), side.at("spec").at("s").get<Index>(),
                side.at("spec").at("d").get<Index>()};
  model.gamma = side.at("gamma").get<double>();
  model.bias = side.at("bias").get<double>();
  model.w_out = require_tensor(tensors, "w_out", path);
  if (model.w_out.rows() != model.spec.d || model.w_out.cols() != model.feature_dim())
    throw IoError("checkpoint '" + path + "' has inconsistent readout shape");
  return model;
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

// FIPS 180-1 SHA-1, enough for content fingerprints.
class Sha1 {
public:
  void update(const unsigned char* data, std::size_t len) {
    total_ += len;
    while (len > 0) {
      const std::size_t take = std::min(len, std::size_t{64} - fill_);
      std::memcpy(buf_ + fill_, data, take);
      fill_ += take;
      data += take;
      len -= take;
      if (fill_ == 64) {
        process(buf_);
        fill_ = 0;
      }
    }
  }

  std::string hex_digest() {
    const std::uint64_t bits = total_ * 8;
    const unsigned char pad = 0x80;
    update(&pad, 1);
    const unsigned char zero = 0;
    while (fill_ != 56) update(&zero, 1);
    unsigned char len_be[8];
    for (int i = 0; i < 8; ++i) len_be[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
    update(len_be, 8);
    std::string out;
    out.reserve(40);
    for (const std::uint32_t word : h_)
      for (int shift = 28; shift >= 0; shift -= 4)
        out.push_back("0123456789abcdef"[(word >> shift) & 0xF]);
    return out;
  }

private:
  static std::uint32_t rol(std::uint32_t v, int n) { return (v << n) | (v >> (32 - n)); }

  void process(const unsigned char* p) {
    std::uint32_t w[80];
    for (int i = 0; i < 16; ++i)
      w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
             (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
    for (int i = 16; i < 80; ++i) w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
    std::uint32_t a = h_[0], b = h_[1], c = h_[2], d = h_[3], e = h_[4];
    for (int i = 0; i < 80; ++i) {
      std::uint32_t f, k;
      if (i < 20) {
        f = (b & c) | (~b & d);
        k = 0x5A827999;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDC;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6;
      }
      const std::uint32_t tmp = rol(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rol(b, 30);
      b = a;
      a = tmp;
    }
    h_[0] += a;
    h_[1] += b;
    h_[2] += c;
    h_[3] += d;
    h_[4] += e;
  }

  std::uint32_t h_[5] = {0x67452301, 0xEFCDAB89, 0x98BADCFE, 0x10325476, 0xC3D2E1F0};
  unsigned char buf_[64];
  std::size_t fill_ = 0;
  std::uint64_t total_ = 0;
};

} // namespace

std::string git_blob_sha1_hex(std::string_view content) {
  Sha1 sha;
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  sha.update(reinterpret_cast<const unsigned char*>(header.data()), header.size());
  sha.update(reinterpret_cast<const unsigned char*>(content.data()), content.size());
  return sha.hex_digest();
}

void write_manifest(const std::string& dir, const std::string& config_json,
                    double wall_seconds) {
  json manifest;
  try {
    manifest["config"] = json::parse(config_json);
  } catch (const json::exception&) {
    manifest["config"] = config_json;
  }
  manifest["wall_time_s"] = wall_seconds;

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().filename() != "manifest.json")
      names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());

  json files = json::object();
  for (const auto& name : names) {
    std::ifstream in((fs::path(dir) / name).string(), std::ios::binary);
    std::ostringstream content;
    content << in.rdbuf();
    files[name] = git_blob_sha1_hex(content.str());
  }
  manifest["files"] = files;

  std::ofstream out = open_out((fs::path(dir) / "manifest.json").string());
  out << manifest.dump(2) << "\n";
  if (!out) throw IoError("write failed for manifest in '" + dir + "'");
}

} // namespace anvar
