#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nlwave::runio {

/// Flat key=value experiment record. std::map keeps the echo deterministic.
using Config = std::map<std::string, std::string>;

/// Parses a key=value file: '#' comment lines and blank lines are ignored,
/// whitespace around keys and values is trimmed. Throws std::invalid_argument
/// (with a line number) on lines without '=', empty keys, or duplicates.
Config read_config(const std::string& path);

/// Writes the config back out, keys sorted, one key=value per line.
void write_config(const Config& cfg, const std::string& path);

/// Fixed decimal formatting for output payloads: round-trips doubles and is
/// byte-stable across runs.
std::string format_double(double v);

/// Root directory for run outputs: $NLWAVE_OUTPUT_ROOT when set, else ".".
std::string output_root();

/// Recursively creates dir and returns it. Throws std::runtime_error.
std::string ensure_dir(const std::string& dir);

/// One-line machine-readable error record for stderr:
/// {"error":{"kind":..., "exit_code":..., "message":..., "violations":[...]}}.
std::string error_json(const std::string& kind, int exit_code, const std::string& message,
                       const std::vector<std::string>& violations = {});

/// CSV writer: emits "# schema=1", optional extra '#' comment lines, then the
/// header row. Fields are written verbatim (callers format numbers).
class CsvFile {
  public:
    CsvFile(const std::string& path, const std::vector<std::string>& columns,
            const std::vector<std::string>& comments = {});
    void row(const std::vector<std::string>& fields);
    /// Flushes and verifies the stream; throws std::runtime_error on failure.
    void close();

  private:
    std::ofstream out_;
    std::size_t n_cols_ = 0;
    std::string path_;
};

/// Whitespace-delimited "t x value" rows, one block per time with a blank
/// line between blocks (the layout gnuplot's splot expects for waterfall and
/// contour plots). values is (xs.size() x times.size()).
void write_waterfall(const std::string& path, const std::vector<double>& times,
                     const Eigen::VectorXd& xs, const Eigen::MatrixXd& values,
                     const std::vector<std::string>& comments = {});

} // namespace nlwave::runio
