#include "frontdoor/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "frontdoor/error.hpp"

namespace frontdoor {

Dataset::Dataset(std::vector<std::string> names, std::size_t rows)
    : names_(std::move(names)),
      rows_(rows),
      values_(names_.size(), std::vector<double>(rows, std::numeric_limits<double>::quiet_NaN())),
      observed_(names_.size(), std::vector<bool>(rows, false)) {}

std::size_t Dataset::column(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw Error(Errc::UnknownColumn, "unknown column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - names_.begin());
}

std::optional<double> Dataset::at(std::size_t col, std::size_t row) const {
    if (!observed_[col][row]) return std::nullopt;
    return values_[col][row];
}

void Dataset::set(std::size_t col, std::size_t row, double value) {
    values_[col][row] = value;
    observed_[col][row] = true;
}

void Dataset::set_missing(std::size_t col, std::size_t row) {
    values_[col][row] = std::numeric_limits<double>::quiet_NaN();
    observed_[col][row] = false;
}

std::size_t Dataset::missing_count(std::size_t col) const {
    return static_cast<std::size_t>(std::count(observed_[col].begin(), observed_[col].end(), false));
}

bool Dataset::complete() const {
    for (std::size_t c = 0; c < cols(); ++c)
        if (missing_count(c) != 0) return false;
    return true;
}

std::vector<double> Dataset::complete_values(std::size_t col) const {
    if (missing_count(col) != 0)
        throw Error(Errc::MissingValue, "column '" + names_[col] + "' has missing cells");
    return values_[col];
}

std::vector<double> Dataset::observed_values(std::size_t col) const {
    std::vector<double> out;
    out.reserve(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        if (observed_[col][r]) out.push_back(values_[col][r]);
    return out;
}

Dataset Dataset::complete_cases() const {
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < rows_; ++r) {
        bool all = true;
        for (std::size_t c = 0; c < cols() && all; ++c) all = observed_[c][r];
        if (all) keep.push_back(r);
    }
    Dataset out(names_, keep.size());
    for (std::size_t c = 0; c < cols(); ++c)
        for (std::size_t i = 0; i < keep.size(); ++i) out.set(c, i, values_[c][keep[i]]);
    return out;
}

bool Dataset::operator==(const Dataset& other) const {
    if (names_ != other.names_ || rows_ != other.rows_ || observed_ != other.observed_) return false;
    for (std::size_t c = 0; c < cols(); ++c)
        for (std::size_t r = 0; r < rows_; ++r)
            if (observed_[c][r] && values_[c][r] != other.values_[c][r]) return false;
    return true;
}

std::string format_double(double value) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string to_csv(const Dataset& data) {
    std::string out;
    for (std::size_t c = 0; c < data.cols(); ++c) {
        if (c) out += ',';
        out += data.names()[c];
    }
    out += '\n';
    for (std::size_t r = 0; r < data.rows(); ++r) {
        for (std::size_t c = 0; c < data.cols(); ++c) {
            if (c) out += ',';
            auto v = data.at(c, r);
            out += v ? format_double(*v) : std::string("NA");
        }
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

Dataset from_csv(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto pos = text.find('\n', start);
        auto line = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        if (!trim(line).empty()) lines.push_back(line);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    if (lines.empty()) throw Error(Errc::DataParse, "empty CSV: missing header");

    std::vector<std::string> names;
    for (auto f : split(lines[0])) {
        auto name = trim(f);
        if (name.empty()) throw Error(Errc::DataParse, "line 1: empty column name");
        names.emplace_back(name);
    }

    Dataset data(names, lines.size() - 1);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        auto fields = split(lines[r]);
        if (fields.size() != names.size())
            throw Error(Errc::DataParse, "line " + std::to_string(r + 1) + ": expected " +
                                             std::to_string(names.size()) + " fields, got " +
                                             std::to_string(fields.size()));
        for (std::size_t c = 0; c < fields.size(); ++c) {
            auto f = trim(fields[c]);
            if (f == "NA") continue;
            double v = 0.0;
            auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (res.ec != std::errc() || res.ptr != f.data() + f.size() || !std::isfinite(v))
                throw Error(Errc::DataParse, "line " + std::to_string(r + 1) + ": bad value '" + std::string(f) + "'");
            data.set(c, r - 1, v);
        }
    }
    return data;
}

void write_text(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::Io, "cannot write '" + path + "'");
    out << text;
    if (!out) throw Error(Errc::Io, "write failed for '" + path + "'");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::InputMissing, "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_csv(const Dataset& data, const std::string& path) { write_text(path, to_csv(data)); }

Dataset read_csv(const std::string& path) { return from_csv(read_text(path)); }

}  // namespace frontdoor
