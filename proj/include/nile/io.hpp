#pragma once

// CSV files exchanged with other tools: solution sets, genome sidecars and
// convergence logs. Numbers are written in shortest round-trip form.

#include <filesystem>
#include <string>
#include <vector>

#include "nile/emodps.hpp"
#include "nile/metrics.hpp"

namespace nile {

inline const std::vector<std::string> kObjectiveColumns = {"obj_ED", "obj_SD", "obj_HAD", "obj_EH"};

struct LabeledSet {
    std::vector<std::string> columns;
    SolutionSet points;
};

/// Reads a solution-set CSV. The header must be `obj_ED,obj_SD,obj_HAD,obj_EH`
/// or `obj_1,...,obj_d`. A header-only file is an empty set.
LabeledSet read_solution_set(const std::filesystem::path& path);

std::string solution_set_csv(const SolutionSet& set, const std::vector<std::string>& columns = kObjectiveColumns);

/// One row per archive entry, header gene_0..gene_{n-1}.
std::string genomes_csv(const std::vector<Genome>& genomes);
std::vector<Genome> read_genomes(const std::filesystem::path& path);

std::string convergence_csv(const std::vector<ConvergenceRecord>& records);

/// Writes to a temporary sibling then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Parses a comma-separated list of numbers, throwing UsageError on junk.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace nile
