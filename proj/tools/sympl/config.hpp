#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "sympl/core.hpp"

namespace sympl::cli {

using json = nlohmann::ordered_json;

// Bad flags or config contents: exit code 1.
class UsageError : public std::runtime_error {
public:
    UsageError(std::string code, const std::string& msg) : std::runtime_error(msg), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

enum class Format { Csv, Json };

struct RunOptions {
    std::string config_path;
    std::string out_path;  // empty: stdout
    Format format = Format::Json;
    bool format_given = false;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::string summary_path;

    std::uint64_t require_seed(const std::string& why) const;
    double tol_or(double fallback) const { return tol ? *tol : fallback; }
};

// A JSON object whose keys must all be consumed; leftovers are rejected.
class Config {
public:
    Config() : j_(json::object()) {}
    explicit Config(json j, std::string where = "config");

    bool has(const std::string& key) const;
    const json& raw(const std::string& key);  // marks as used
    Config object(const std::string& key);
    std::optional<Config> optional_object(const std::string& key);

    double number(const std::string& key);
    double number(const std::string& key, double fallback);
    int integer(const std::string& key);
    int integer(const std::string& key, int fallback);
    bool boolean(const std::string& key, bool fallback);
    std::string string(const std::string& key);
    std::string string(const std::string& key, const std::string& fallback);
    std::vector<double> numbers(const std::string& key);
    std::vector<int> integers(const std::string& key);
    Mat matrix(const std::string& key);

    // Raises UsageError for unknown keys.
    void finish() const;
    const std::string& where() const { return where_; }

private:
    json j_;
    std::string where_;
    std::set<std::string> used_;

    const json& get(const std::string& key);
    [[noreturn]] void bad(const std::string& key, const std::string& what) const;
};

Config load_config(const std::string& path);

double as_number(const json& v, const std::string& where);
Mat as_matrix(const json& v, const std::string& where);
// numbers list or {"lo", "hi", "points", "spacing": "log"|"linear"}
std::vector<double> as_grid(Config& c, const std::string& key);

json to_json(const Mat& M);
json to_json(const Vec& v);
json to_json(const std::vector<double>& v);

// 17 significant digits
std::string fmt_double(double x);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void row(const std::vector<std::string>& cells);
    std::string str() const { return out_; }

private:
    std::size_t cols_;
    std::string out_;
};

// Writes via a temporary file and rename, so a failed run leaves nothing behind.
void write_output(const std::string& path, const std::string& content);

}  // namespace sympl::cli
