#include "tdc/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tdc/errors.hpp"

namespace tdc {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

double parse_double(const std::string& text, const std::string& where) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw DataError(where + ": cannot parse number '" + text + "'");
    return value;
}

std::int64_t parse_int(const std::string& text, const std::string& where) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw DataError(where + ": cannot parse integer '" + text + "'");
    return value;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::vector<EventRecord> read_event_csv(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"timestamp", "attribute", "value"})
        throw DataError(path + ": expected header 'timestamp,attribute,value'");
    std::vector<EventRecord> events;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 3) throw DataError(path + ": malformed row '" + line + "'");
        events.push_back({parse_int(fields[0], path), fields[1], parse_double(fields[2], path)});
    }
    return events;
}

void write_event_csv(const std::string& path, const std::vector<EventRecord>& events) {
    std::ofstream out = open_output(path);
    out << "timestamp,attribute,value\n";
    for (const EventRecord& e : events)
        out << e.timestamp << ',' << e.attribute << ',' << format_double(e.value) << '\n';
}

SequenceMatrix read_matrix_csv(const std::string& path, double sentinel) {
    std::ifstream in = open_input(path);
    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rows.push_back(split_csv_line(line));
    }
    if (rows.empty()) throw DataError(path + ": empty matrix file");
    const std::size_t cols = rows.front().size();
    if (cols < 2) throw DataError(path + ": matrix needs at least one lag column");
    SequenceMatrix matrix;
    matrix.sentinel = sentinel;
    matrix.values = Mat(rows.size(), cols - 1, sentinel);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw DataError(path + ": ragged matrix row");
        matrix.attribute_names.push_back(rows[i][0]);
        for (std::size_t s = 1; s < cols; ++s)
            if (!rows[i][s].empty()) matrix.values(i, s - 1) = parse_double(rows[i][s], path);
    }
    return matrix;
}

void write_matrix_csv(const std::string& path, const SequenceMatrix& matrix) {
    std::ofstream out = open_output(path);
    for (std::size_t i = 0; i < matrix.attrs(); ++i) {
        out << matrix.attribute_names[i];
        for (std::size_t s = 0; s < matrix.len(); ++s) {
            out << ',';
            if (!matrix.is_missing(i, s)) out << format_double(matrix.values(i, s));
        }
        out << '\n';
    }
}

Series read_series_csv(const std::string& path, double sentinel) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty series file");
    Series series;
    series.sentinel = sentinel;
    series.attributes = split_csv_line(line);
    const std::size_t attrs = series.attributes.size();

    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != attrs) throw DataError(path + ": ragged series row");
        rows.push_back(std::move(fields));
    }
    if (rows.empty()) throw DataError(path + ": series has no steps");
    series.values = Mat(attrs, rows.size(), sentinel);
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t i = 0; i < attrs; ++i)
            if (!rows[t][i].empty()) series.values(i, t) = parse_double(rows[t][i], path);
    return series;
}

void write_series_csv(const std::string& path, const Series& series) {
    std::ofstream out = open_output(path);
    for (std::size_t i = 0; i < series.attributes.size(); ++i)
        out << (i ? "," : "") << series.attributes[i];
    out << '\n';
    for (std::size_t t = 0; t < series.values.cols(); ++t) {
        for (std::size_t i = 0; i < series.attributes.size(); ++i) {
            if (i) out << ',';
            if (series.values(i, t) != series.sentinel) out << format_double(series.values(i, t));
        }
        out << '\n';
    }
}

void write_event_dataset(const std::string& dir, const EventDataset& dataset) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out = open_output(dir + "/events.csv");
        out << "sample,timestamp,attribute,value\n";
        for (std::size_t s = 0; s < dataset.size(); ++s)
            for (const EventRecord& e : dataset.events[s])
                out << s << ',' << e.timestamp << ',' << e.attribute << ','
                    << format_double(e.value) << '\n';
    }
    {
        std::ofstream out = open_output(dir + "/labels.csv");
        out << "sample,label\n";
        for (std::size_t s = 0; s < dataset.size(); ++s)
            out << s << ',' << dataset.labels[s] << '\n';
    }
    nlohmann::json meta;
    meta["attributes"] = dataset.attributes;
    meta["length"] = dataset.len;
    meta["samples"] = dataset.size();
    std::ofstream out = open_output(dir + "/meta.json");
    out << meta.dump(2) << '\n';
}

EventDataset read_event_dataset(const std::string& dir) {
    EventDataset dataset;
    {
        std::ifstream in = open_input(dir + "/meta.json");
        nlohmann::json meta = nlohmann::json::parse(in, nullptr, false);
        if (meta.is_discarded()) throw DataError(dir + "/meta.json: invalid JSON");
        dataset.attributes = meta.at("attributes").get<std::vector<std::string>>();
        dataset.len = meta.at("length").get<int>();
        dataset.events.resize(meta.at("samples").get<std::size_t>());
        dataset.labels.assign(dataset.events.size(), 0);
    }
    {
        std::ifstream in = open_input(dir + "/labels.csv");
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto fields = split_csv_line(line);
            if (fields.size() != 2) throw DataError(dir + "/labels.csv: malformed row");
            auto s = static_cast<std::size_t>(parse_int(fields[0], "labels.csv"));
            if (s >= dataset.labels.size()) throw DataError(dir + "/labels.csv: sample out of range");
            dataset.labels[s] = static_cast<int>(parse_int(fields[1], "labels.csv"));
        }
    }
    {
        std::ifstream in = open_input(dir + "/events.csv");
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto fields = split_csv_line(line);
            if (fields.size() != 4) throw DataError(dir + "/events.csv: malformed row");
            auto s = static_cast<std::size_t>(parse_int(fields[0], "events.csv"));
            if (s >= dataset.events.size()) throw DataError(dir + "/events.csv: sample out of range");
            dataset.events[s].push_back({parse_int(fields[1], "events.csv"), fields[2],
                                         parse_double(fields[3], "events.csv")});
        }
    }
    return dataset;
}

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::uint64_t hash = 1469598103934665603ull;
    char buffer[4096];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 1099511628211ull;
        }
        if (!in) break;
    }
    return hash;
}

}  // namespace tdc
