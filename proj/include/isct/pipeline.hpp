#pragma once

#include <string>

#include "isct/config.hpp"
#include "isct/dbar.hpp"
#include "isct/extract.hpp"
#include "isct/io.hpp"
#include "isct/verify.hpp"

namespace isct {
namespace pipeline {

enum class Mode { full, born, restricted };

Mode parse_mode(const std::string& name);  // throws std::invalid_argument

struct RunReport {
  double eta_hat = 0, delta1_hat = 0, delta2_hat = 0;
  double contraction = 0;
  int fp_iterations = 0;
  double gap = 0;
  double r1 = 0, r2 = 0;
  double norm_vplus = 0, norm_vminus = 0;
  long skipped_nodes = 0;
  std::string mode;
};

// In-process core of the reconstruct command; returns the extracted limits
// and the real-space field. Throws std::runtime_error naming the failing
// stage.
struct ReconstructResult {
  io::RecOutputs rec;
  RunReport report;
};

ReconstructResult reconstruct(const ScatteringData& data, const RunConfig& cfg, Mode mode);

// CLI entry points: return process exit codes (0 ok, 1 solver/check
// failure, 2 usage or I/O).
int cmd_simulate(const std::string& config_path, const std::string& potential_path,
                 const std::string& out_path, std::ostream& log);
int cmd_reconstruct(const std::string& config_path, const std::string& data_path,
                    const std::string& out_dir, const std::string& mode, std::ostream& log);
int cmd_verify(const std::string& config_path, const std::string& suite,
               const std::string& out_path, std::ostream& log);

}  // namespace pipeline
}  // namespace isct
