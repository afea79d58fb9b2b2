#include "zipscan/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "zipscan/errors.hpp"

namespace zipscan {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& raw, int line_no, const char* what) {
    const std::string s = trim(raw);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw DataError("line " + std::to_string(line_no) + ": malformed " + what + " '" + raw + "'");
    }
    return value;
}

long long parse_count(const std::string& raw, int line_no, const char* what) {
    const std::string s = trim(raw);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw DataError("line " + std::to_string(line_no) + ": malformed " + what + " '" + raw + "'");
    }
    return value;
}

}  // namespace

Dataset load_region_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open input file " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    const std::vector<std::string> header = split_csv_line(trim(line));

    const std::vector<std::string> base = {"id", "x", "y", "population", "cases"};
    const bool has_d = header.size() == 6 && trim(header[5]) == "structural_zero";
    if (header.size() != 5 && !has_d) {
        throw DataError(path + ": header must be id,x,y,population,cases[,structural_zero]");
    }
    for (std::size_t i = 0; i < base.size(); ++i) {
        if (header.size() <= i || trim(header[i]) != base[i]) {
            throw DataError(path + ": header must be id,x,y,population,cases[,structural_zero]");
        }
    }

    std::vector<Region> regions;
    CaseData cases;
    std::vector<std::uint8_t> d;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(trimmed);
        if (fields.size() != header.size()) {
            throw DataError(path + ": line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        }
        Region r;
        r.id = trim(fields[0]);
        if (r.id.empty()) throw DataError(path + ": line " + std::to_string(line_no) + ": empty id");
        r.x = parse_double(fields[1], line_no, "x");
        r.y = parse_double(fields[2], line_no, "y");
        r.population = parse_double(fields[3], line_no, "population");
        if (r.population < 0.0) {
            throw DataError(path + ": line " + std::to_string(line_no) + ": negative population");
        }
        const long long count = parse_count(fields[4], line_no, "cases");
        if (count < 0) {
            throw DataError(path + ": line " + std::to_string(line_no) + ": negative case count");
        }
        if (has_d) {
            const long long flag = parse_count(fields[5], line_no, "structural_zero");
            if (flag != 0 && flag != 1) {
                throw DataError(path + ": line " + std::to_string(line_no) +
                                ": structural_zero must be 0 or 1");
            }
            d.push_back(static_cast<std::uint8_t>(flag));
        }
        regions.push_back(std::move(r));
        cases.counts.push_back(count);
    }

    if (has_d) cases.structural_zero = std::move(d);
    try {
        Dataset dataset{RegionMap(std::move(regions)), std::move(cases)};
        validate_case_data(dataset.map, dataset.cases);
        return dataset;
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

std::string format_double(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

namespace {

void write_comment(std::ofstream& out, const std::string& comment) {
    if (comment.empty()) return;
    std::stringstream ss(comment);
    std::string line;
    while (std::getline(ss, line)) out << "# " << line << "\n";
}

}  // namespace

void write_study_csv(const std::string& path, const std::vector<StudyReport>& reports,
                     const std::string& header_comment) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    write_comment(out, header_comment);
    out << "scenario,method,power,sensitivity,ppv,N,B,seed\n";
    for (const StudyReport& report : reports) {
        for (const MethodMetrics& mm : report.methods) {
            out << report.scenario << ',' << to_string(mm.method) << ','
                << format_double(mm.power) << ',' << format_double(mm.mean_sensitivity) << ','
                << format_double(mm.mean_ppv) << ',' << report.studies << ',' << report.replicas
                << ',' << report.seed << "\n";
        }
    }
}

void write_type_i_csv(const std::string& path, const std::vector<TypeIResult>& results,
                      int studies, int replicas, double alpha, std::uint64_t seed,
                      const std::string& header_comment) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    write_comment(out, header_comment);
    out << "method,rejection_proportion,N,B,alpha,seed\n";
    for (const TypeIResult& r : results) {
        out << to_string(r.method) << ',' << format_double(r.rejection_proportion) << ','
            << studies << ',' << replicas << ',' << format_double(alpha) << ',' << seed << "\n";
    }
}

void write_replica_log_csv(const std::string& path, const ReplicaSummary& replicas) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "replica_index,lambda,structural_zero_count\n";
    for (std::size_t b = 0; b < replicas.log_lambdas.size(); ++b) {
        out << (b + 1) << ',' << format_double(std::exp(replicas.log_lambdas[b])) << ','
            << replicas.structural_zero_counts[b] << "\n";
    }
}

}  // namespace zipscan
