#include "nile/io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "nile/error.hpp"

namespace nile {

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

void chomp(std::string& line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
}

double parse_number(const std::string& s, const std::string& where) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError(fmt::format("{}: '{}' is not a number", where, s));
    }
    if (used != s.size()) throw UsageError(fmt::format("{}: '{}' is not a number", where, s));
    return v;
}

std::string join_numbers(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) out += fmt::format("{}{}", i ? "," : "", values[i]);
    return out;
}

bool generic_header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] != fmt::format("obj_{}", i + 1)) return false;
    }
    return !cols.empty();
}

}  // namespace

LabeledSet read_solution_set(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open solution set '{}'", path.string()));
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(fmt::format("solution set '{}' has no header", path.string()));
    chomp(line);
    LabeledSet out;
    out.columns = split(line);
    if (out.columns != kObjectiveColumns && !generic_header(out.columns)) {
        throw ConfigError(fmt::format("solution set '{}': header must be obj_ED,obj_SD,obj_HAD,obj_EH or obj_1..obj_d",
                                      path.string()));
    }
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        chomp(line);
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != out.columns.size()) {
            throw ConfigError(fmt::format("solution set '{}': row {} has {} fields, expected {}", path.string(), row,
                                          fields.size(), out.columns.size()));
        }
        Point p;
        for (const auto& f : fields) {
            try {
                p.push_back(parse_number(f, path.string()));
            } catch (const UsageError& e) {
                throw ConfigError(e.what());
            }
        }
        out.points.push_back(std::move(p));
    }
    try {
        check_dimension(out.points);
    } catch (const UsageError& e) {
        throw ConfigError(fmt::format("solution set '{}': {}", path.string(), e.what()));
    }
    return out;
}

std::string solution_set_csv(const SolutionSet& set, const std::vector<std::string>& columns) {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
    out += '\n';
    for (const auto& p : set) {
        if (p.size() != columns.size()) throw UsageError("solution_set_csv: point dimension differs from header");
        out += join_numbers(p) + '\n';
    }
    return out;
}

std::string genomes_csv(const std::vector<Genome>& genomes) {
    std::string out;
    const std::size_t n = genomes.empty() ? 0 : genomes.front().size();
    for (std::size_t i = 0; i < n; ++i) out += fmt::format("{}gene_{}", i ? "," : "", i);
    out += '\n';
    for (const auto& g : genomes) out += join_numbers(g) + '\n';
    return out;
}

std::vector<Genome> read_genomes(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open genome file '{}'", path.string()));
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(fmt::format("genome file '{}' has no header", path.string()));
    chomp(line);
    const std::size_t width = split(line).size();
    std::vector<Genome> out;
    while (std::getline(in, line)) {
        chomp(line);
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != width) throw ConfigError(fmt::format("genome file '{}': ragged row", path.string()));
        Genome g;
        for (const auto& f : fields) {
            try {
                g.push_back(parse_number(f, path.string()));
            } catch (const UsageError& e) {
                throw ConfigError(e.what());
            }
        }
        out.push_back(std::move(g));
    }
    return out;
}

std::string convergence_csv(const std::vector<ConvergenceRecord>& records) {
    std::string out = "nfe,hypervolume\n";
    for (const auto& r : records) out += fmt::format("{},{}\n", r.nfe, r.hypervolume);
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", tmp.string()));
        out << content;
        out.flush();
        if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", tmp.string()));
    }
    std::filesystem::rename(tmp, path);
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& f : split(text)) out.push_back(parse_number(f, "number list"));
    return out;
}

}  // namespace nile
