#pragma once

#include <map>
#include <string>

#include "isct/config.hpp"
#include "isct/extract.hpp"
#include "isct/fields.hpp"

namespace isct {
namespace io {

enum class IoErrorKind { version, truncation, dimension, energy, body, missing };

class IoError : public std::runtime_error {
 public:
  IoError(IoErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  IoErrorKind kind() const { return kind_; }

 private:
  IoErrorKind kind_;
};

// Scattering files: one JSON header line, then the amplitude row-major over
// (k-node, l-node) as interleaved (re, im) pairs, little-endian float64 in
// binary mode or one pair per CSV line.
void write_scattering(const std::string& path, const ScatteringData& data, bool binary = true);
ScatteringData read_scattering(const std::string& path, const RunConfig& cfg);

struct RecOutputs {
  double E = 0, tau = 0, mu0 = 0;
  double norm_vplus = 0, norm_vminus = 0, gap = 0;
  VectorXcd vplus, vminus;
  std::vector<Vec3> p_nodes;
  std::vector<Vec3> x_nodes;
  std::vector<double> v_appr;
};

void write_reconstruction(const std::string& path, const RecOutputs& rec);

// FNV-1a content hash, hex-encoded; stable across runs and platforms.
std::string file_hash(const std::string& path);
std::string string_hash(const std::string& text);

// Manifest: config hash, input and output hashes, component version.
void write_manifest(const std::string& path, const RunConfig& cfg,
                    const std::map<std::string, std::string>& inputs,
                    const std::map<std::string, std::string>& outputs);

// Deterministic shortest-roundtrip float formatting shared by all writers.
std::string format_double(double v);

}  // namespace io
}  // namespace isct
