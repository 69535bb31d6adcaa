#include "nlwave/runio.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>

#include <json.hpp>

namespace nlwave::runio {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

} // namespace

Config read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config file '" + path + "'");
    Config cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#')
            continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": expected key=value, got '" + stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": empty key");
        if (cfg.count(key))
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": duplicate key '" + key + "'");
        cfg[key] = value;
    }
    return cfg;
}

void write_config(const Config& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    for (const auto& [key, value] : cfg)
        out << key << "=" << value << "\n";
    out.flush();
    if (!out)
        throw std::runtime_error("write to '" + path + "' failed");
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string output_root() {
    const char* env = std::getenv("NLWAVE_OUTPUT_ROOT");
    if (env != nullptr && env[0] != '\0')
        return env;
    return ".";
}

std::string ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory '" + dir +
                                 "': " + ec.message());
    return dir;
}

std::string error_json(const std::string& kind, int exit_code, const std::string& message,
                       const std::vector<std::string>& violations) {
    nlohmann::json j;
    j["error"]["kind"] = kind;
    j["error"]["exit_code"] = exit_code;
    j["error"]["message"] = message;
    if (!violations.empty())
        j["error"]["violations"] = violations;
    return j.dump();
}

CsvFile::CsvFile(const std::string& path, const std::vector<std::string>& columns,
                 const std::vector<std::string>& comments)
    : out_(path), n_cols_(columns.size()), path_(path) {
    if (!out_)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    out_ << "# schema=1\n";
    for (const std::string& c : comments)
        out_ << "# " << c << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

void CsvFile::row(const std::vector<std::string>& fields) {
    if (fields.size() != n_cols_)
        throw std::logic_error("CSV row width mismatch in '" + path_ + "'");
    for (std::size_t i = 0; i < fields.size(); ++i)
        out_ << fields[i] << (i + 1 < fields.size() ? "," : "\n");
}

void CsvFile::close() {
    out_.flush();
    if (!out_)
        throw std::runtime_error("write to '" + path_ + "' failed");
    out_.close();
}

void write_waterfall(const std::string& path, const std::vector<double>& times,
                     const Eigen::VectorXd& xs, const Eigen::MatrixXd& values,
                     const std::vector<std::string>& comments) {
    if (values.rows() != xs.size() || values.cols() != static_cast<Eigen::Index>(times.size()))
        throw std::logic_error("write_waterfall: shape mismatch");
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "# schema=1\n";
    for (const std::string& c : comments)
        out << "# " << c << "\n";
    out << "# t x value\n";
    for (std::size_t f = 0; f < times.size(); ++f) {
        const std::string t = format_double(times[f]);
        for (Eigen::Index i = 0; i < xs.size(); ++i)
            out << t << " " << format_double(xs[i]) << " " << format_double(values(i, f))
                << "\n";
        if (f + 1 < times.size())
            out << "\n";
    }
    out.flush();
    if (!out)
        throw std::runtime_error("write to '" + path + "' failed");
}

} // namespace nlwave::runio
