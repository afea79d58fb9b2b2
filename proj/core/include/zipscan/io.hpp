#pragma once

#include <string>
#include <vector>

#include "zipscan/detector.hpp"
#include "zipscan/region_map.hpp"
#include "zipscan/simulate.hpp"

namespace zipscan {

/// A parsed region file: the map plus the aligned counts.
struct Dataset {
    RegionMap map;
    CaseData cases;
};

/// Reads the region CSV `id,x,y,population,cases[,structural_zero]`
/// (UTF-8, '.' decimal separator, optional CR line endings). Throws
/// DataError with the offending line number on malformed input, including
/// a flagged structural zero with a positive count.
Dataset load_region_csv(const std::string& path);

/// Shortest round-trip decimal form of a double (to_chars).
std::string format_double(double value);

/// Study results as `scenario,method,power,sensitivity,ppv,N,B,seed` rows.
/// A nonempty header_comment is emitted first as '# ...' lines.
void write_study_csv(const std::string& path, const std::vector<StudyReport>& reports,
                     const std::string& header_comment = {});

/// Type I results as `method,rejection_proportion,N,B,alpha,seed` rows.
void write_type_i_csv(const std::string& path, const std::vector<TypeIResult>& results,
                      int studies, int replicas, double alpha, std::uint64_t seed,
                      const std::string& header_comment = {});

/// Replica log as `replica_index,lambda,structural_zero_count` rows.
void write_replica_log_csv(const std::string& path, const ReplicaSummary& replicas);

}  // namespace zipscan
