#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sympl/sensing.hpp"

namespace sympl::cli {

std::uint64_t RunOptions::require_seed(const std::string& why) const {
    if (!seed) throw UsageError("MissingSeed", "--seed is required: " + why);
    return *seed;
}

Config::Config(json j, std::string where) : j_(std::move(j)), where_(std::move(where)) {
    if (!j_.is_object()) throw UsageError("InvalidConfig", where_ + " must be a JSON object");
}

bool Config::has(const std::string& key) const { return j_.contains(key); }

void Config::bad(const std::string& key, const std::string& what) const {
    throw UsageError("InvalidConfig", where_ + "." + key + ": " + what);
}

const json& Config::get(const std::string& key) {
    if (!j_.contains(key)) bad(key, "missing");
    used_.insert(key);
    return j_.at(key);
}

const json& Config::raw(const std::string& key) { return get(key); }

Config Config::object(const std::string& key) {
    const json& v = get(key);
    if (!v.is_object()) bad(key, "expected an object");
    return Config(v, where_ + "." + key);
}

std::optional<Config> Config::optional_object(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return object(key);
}

double Config::number(const std::string& key) { return as_number(get(key), where_ + "." + key); }

double Config::number(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
}

int Config::integer(const std::string& key) {
    const json& v = get(key);
    if (!v.is_number_integer()) bad(key, "expected an integer");
    return v.get<int>();
}

int Config::integer(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }

bool Config::boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = get(key);
    if (!v.is_boolean()) bad(key, "expected true/false");
    return v.get<bool>();
}

std::string Config::string(const std::string& key) {
    const json& v = get(key);
    if (!v.is_string()) bad(key, "expected a string");
    return v.get<std::string>();
}

std::string Config::string(const std::string& key, const std::string& fallback) {
    return has(key) ? string(key) : fallback;
}

std::vector<double> Config::numbers(const std::string& key) {
    const json& v = get(key);
    if (v.is_number()) return {as_number(v, where_ + "." + key)};
    if (!v.is_array() || v.empty()) bad(key, "expected a non-empty list of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(as_number(e, where_ + "." + key));
    return out;
}

std::vector<int> Config::integers(const std::string& key) {
    const json& v = get(key);
    if (!v.is_array()) bad(key, "expected a list of integers");
    std::vector<int> out;
    for (const auto& e : v) {
        if (!e.is_number_integer()) bad(key, "expected integers");
        out.push_back(e.get<int>());
    }
    return out;
}

Mat Config::matrix(const std::string& key) { return as_matrix(get(key), where_ + "." + key); }

void Config::finish() const {
    for (const auto& [k, v] : j_.items()) {
        (void)v;
        if (!used_.count(k)) throw UsageError("UnknownKey", where_ + ": unknown key '" + k + "'");
    }
}

Config load_config(const std::string& path) {
    if (path.empty()) return Config(json::object());
    std::ifstream in(path);
    if (!in) throw UsageError("ConfigNotFound", "cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError("ConfigParse", std::string("config is not valid JSON: ") + e.what());
    }
    return Config(std::move(j));
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw UsageError("InvalidConfig", where + ": expected a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) throw UsageError("InvalidConfig", where + ": not finite");
    return x;
}

Mat as_matrix(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty() || !v[0].is_array())
        throw UsageError("InvalidConfig", where + ": expected a list of rows");
    const std::size_t rows = v.size(), cols = v[0].size();
    Mat M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        if (!v[i].is_array() || v[i].size() != cols) throw UsageError("InvalidConfig", where + ": ragged rows");
        for (std::size_t j = 0; j < cols; ++j) M(Eigen::Index(i), Eigen::Index(j)) = as_number(v[i][j], where);
    }
    return M;
}

std::vector<double> as_grid(Config& c, const std::string& key) {
    if (!c.has(key)) throw UsageError("InvalidConfig", c.where() + "." + key + ": missing");
    if (!c.raw(key).is_object()) return c.numbers(key);
    Config g = c.object(key);
    double lo = g.number("lo"), hi = g.number("hi");
    int points = g.integer("points");
    std::string spacing = g.string("spacing", "log");
    g.finish();
    if (points < 2 || !(hi > lo)) throw UsageError("InvalidGrid", c.where() + "." + key + ": need points >= 2 and hi > lo");
    if (spacing == "log") {
        if (!(lo > 0)) throw UsageError("InvalidGrid", c.where() + "." + key + ": log grid needs lo > 0");
        return sensing::log_grid(lo, hi, points);
    }
    if (spacing != "linear") throw UsageError("InvalidGrid", "spacing must be 'log' or 'linear'");
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) out[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (points - 1);
    return out;
}

json to_json(const Mat& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
        rows.push_back(r);
    }
    return rows;
}

json to_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json to_json(const std::vector<double>& v) { return json(v); }

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : cols_(header.size()) { row(header); }

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != cols_) throw std::logic_error("csv row width mismatch");
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k) out_ += ',';
        out_ += cells[k];
    }
    out_ += '\n';
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw UsageError("OutputError", "cannot write '" + path + "'");
        out << content;
        if (!out) throw UsageError("OutputError", "write failed for '" + path + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw UsageError("OutputError", "cannot move output into place: " + ec.message());
    }
}

}  // namespace sympl::cli
