#include "isct/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace isct {
namespace io {

namespace {

constexpr const char* kScatFormat = "isct-scat/1";
constexpr const char* kRecFormat = "isct-rec/1";

void atomic_write(const std::string& path, const std::string& payload) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError(IoErrorKind::missing, "cannot open for write: " + tmp);
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw IoError(IoErrorKind::body, "short write: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

// Little-endian encode of a double, independent of host byte order.
void put_f64(std::string& buf, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

double get_f64(const char* raw) {
  uint64_t bits = 0;
  for (int i = 0; i < 8; ++i)
    bits |= static_cast<uint64_t>(static_cast<unsigned char>(raw[i])) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_scattering(const std::string& path, const ScatteringData& data, bool binary) {
  nlohmann::json header;
  header["format"] = kScatFormat;
  header["E"] = data.E;
  header["n_sphere"] = data.grid.n_polar;
  header["scheme"] = "gl-polar-uniform-azimuth";
  header["n_nodes"] = data.grid.size();
  header["body"] = binary ? "binary" : "csv";
  std::string payload = header.dump() + "\n";
  const int n = data.grid.size();
  if (binary) {
    payload.reserve(payload.size() + static_cast<size_t>(n) * n * 16);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        put_f64(payload, data.f(i, j).real());
        put_f64(payload, data.f(i, j).imag());
      }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        payload += format_double(data.f(i, j).real());
        payload += ',';
        payload += format_double(data.f(i, j).imag());
        payload += '\n';
      }
  }
  atomic_write(path, payload);
}

ScatteringData read_scattering(const std::string& path, const RunConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoErrorKind::missing, "scattering file not found: " + path);
  std::string header_line;
  if (!std::getline(in, header_line))
    throw IoError(IoErrorKind::truncation, "empty scattering file");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::exception&) {
    throw IoError(IoErrorKind::version, "unreadable scattering header");
  }
  if (header.value("format", "") != kScatFormat)
    throw IoError(IoErrorKind::version, "scattering format version mismatch");
  const double E = header.at("E").get<double>();
  if (std::abs(E - cfg.E) > 1e-12 * std::max(1.0, cfg.E))
    throw IoError(IoErrorKind::energy, "energy mismatch");
  const int n_sphere = header.at("n_sphere").get<int>();
  if (n_sphere != cfg.n_sphere)
    throw IoError(IoErrorKind::dimension, "sphere resolution mismatch");
  ScatteringData data(SphereGrid(E, n_sphere));
  const int n = data.grid.size();
  if (header.at("n_nodes").get<int>() != n)
    throw IoError(IoErrorKind::dimension, "node count mismatch");

  const std::string body = header.value("body", "binary");
  if (body == "binary") {
    std::string raw(static_cast<size_t>(n) * n * 16, '\0');
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
      throw IoError(IoErrorKind::truncation, "truncated scattering body");
    const char* q = raw.data();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        data.f(i, j) = cplx(get_f64(q), get_f64(q + 8));
        q += 16;
      }
  } else if (body == "csv") {
    std::string line;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (!std::getline(in, line))
          throw IoError(IoErrorKind::truncation, "truncated scattering body");
        const size_t comma = line.find(',');
        if (comma == std::string::npos)
          throw IoError(IoErrorKind::body, "malformed csv row");
        data.f(i, j) = cplx(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
      }
  } else {
    throw IoError(IoErrorKind::body, "unknown body encoding: " + body);
  }
  return data;
}

void write_reconstruction(const std::string& path, const RecOutputs& rec) {
  nlohmann::json header;
  header["format"] = kRecFormat;
  header["E"] = rec.E;
  header["tau"] = rec.tau;
  header["mu0"] = rec.mu0;
  header["norm_vplus"] = rec.norm_vplus;
  header["norm_vminus"] = rec.norm_vminus;
  header["gap"] = rec.gap;
  std::string payload = header.dump() + "\n";
  payload += "# vhat\n";
  for (size_t i = 0; i < rec.p_nodes.size(); ++i) {
    const Vec3& p = rec.p_nodes[i];
    payload += format_double(p(0)) + "," + format_double(p(1)) + "," + format_double(p(2)) + "," +
               format_double(rec.vplus(i).real()) + "," + format_double(rec.vplus(i).imag()) +
               "," + format_double(rec.vminus(i).real()) + "," +
               format_double(rec.vminus(i).imag()) + "\n";
  }
  payload += "# vappr\n";
  for (size_t i = 0; i < rec.x_nodes.size(); ++i) {
    const Vec3& x = rec.x_nodes[i];
    payload += format_double(x(0)) + "," + format_double(x(1)) + "," + format_double(x(2)) + "," +
               format_double(rec.v_appr[i]) + "\n";
  }
  atomic_write(path, payload);
}

std::string string_hash(const std::string& text) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoErrorKind::missing, "cannot hash missing file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return string_hash(ss.str());
}

void write_manifest(const std::string& path, const RunConfig& cfg,
                    const std::map<std::string, std::string>& inputs,
                    const std::map<std::string, std::string>& outputs) {
  nlohmann::json j;
  j["config_hash"] = string_hash(cfg.to_json());
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["versions"] = {{"isct", "0.1.0"}};
  atomic_write(path, j.dump(2) + "\n");
}

}  // namespace io
}  // namespace isct
