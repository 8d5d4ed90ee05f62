#include "mmgenre/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "mmgenre/errors.hpp"

namespace mmgenre {

void atomic_write_text(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw DataError("cannot write " + tmp);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, const std::string& path) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw DataError("bad numeric field '" + s + "' in " + path);
    return v;
}

} // namespace

CsvMatrix load_csv_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open CSV: " + path);

    CsvMatrix out;
    std::string line;
    if (!std::getline(in, line))
        throw DataError("empty CSV: " + path);

    const std::string descriptor_prefix = "# descriptor: ";
    if (line.rfind(descriptor_prefix, 0) == 0) {
        out.descriptor = line.substr(descriptor_prefix.size());
        while (!out.descriptor.empty() && out.descriptor.back() == '\r')
            out.descriptor.pop_back();
        if (!std::getline(in, line))
            throw DataError("CSV missing header: " + path);
    }

    const auto header = split_csv_line(line);
    if (header.empty() || header[0] != "id")
        throw DataError("CSV header must start with 'id': " + path);
    const std::size_t d = header.size() - 1;

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != d + 1)
            throw DataError("ragged CSV row for id '" + fields[0] + "' in " + path);
        out.ids.push_back(fields[0]);
        std::vector<double> row(d);
        for (std::size_t i = 0; i < d; ++i)
            row[i] = parse_double(fields[i + 1], path);
        rows.push_back(std::move(row));
    }

    out.values = Matrix(rows.size(), d);
    for (std::size_t r = 0; r < rows.size(); ++r)
        std::copy(rows[r].begin(), rows[r].end(), out.values.row(r));
    return out;
}

void save_csv_matrix(const std::string& path, const CsvMatrix& csv) {
    std::ostringstream out;
    if (!csv.descriptor.empty())
        out << "# descriptor: " << csv.descriptor << "\n";
    out << "id";
    for (std::size_t c = 0; c < csv.values.cols(); ++c)
        out << ",f" << c;
    out << "\n";
    for (std::size_t r = 0; r < csv.values.rows(); ++r) {
        out << csv.ids[r];
        for (std::size_t c = 0; c < csv.values.cols(); ++c)
            out << "," << format_double(csv.values(r, c));
        out << "\n";
    }
    atomic_write_text(path, out.str());
}

FeatureMatrix ingest_external_features(const std::string& csv_path, const MultiLabelDataset& ds) {
    const CsvMatrix csv = load_csv_matrix(csv_path);

    std::unordered_map<std::string, std::size_t> row_of;
    for (std::size_t r = 0; r < csv.ids.size(); ++r) {
        if (!row_of.emplace(csv.ids[r], r).second)
            throw DataError("duplicate id in " + csv_path + ": " + csv.ids[r]);
    }

    FeatureMatrix fm;
    fm.descriptor = csv.descriptor;
    fm.values = Matrix(ds.size(), csv.values.cols());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto it = row_of.find(ds.ids[i]);
        if (it == row_of.end())
            throw DataError("feature file " + csv_path + " missing id: " + ds.ids[i]);
        std::copy_n(csv.values.row(it->second), csv.values.cols(), fm.values.row(i));
    }
    return fm;
}

void save_score_matrix(const std::string& path, const ScoreMatrix& scores,
                       const std::vector<std::string>& ids, const LabelSpace& space) {
    std::ostringstream out;
    if (!scores.source.empty())
        out << "# descriptor: " << scores.source << "\n";
    out << "id";
    for (const auto& name : space.names)
        out << "," << name;
    out << "\n";
    for (std::size_t r = 0; r < scores.values.rows(); ++r) {
        out << ids[r];
        for (std::size_t c = 0; c < scores.values.cols(); ++c)
            out << "," << format_double(scores.values(r, c));
        out << "\n";
    }
    atomic_write_text(path, out.str());
}

ScoreMatrix load_score_matrix(const std::string& path, const MultiLabelDataset& ds) {
    const FeatureMatrix fm = ingest_external_features(path, ds);
    if (fm.values.cols() != ds.label_space.q())
        throw DataError("score matrix " + path + " column count does not match label space");
    ScoreMatrix sm;
    sm.source = fm.descriptor;
    sm.values = fm.values;
    return sm;
}

} // namespace mmgenre
