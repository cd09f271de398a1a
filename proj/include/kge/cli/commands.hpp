#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "kge/engine/evaluate.hpp"

namespace kge {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;    // bad arguments or configuration
inline constexpr int kExitRuntime = 2;  // data, numeric or I/O failure

// Environment variable naming the directory relative dataset paths fall back to.
inline constexpr const char* kDataRootEnv = "KGE_DATA_ROOT";

// `p` itself if absolute or present; otherwise $KGE_DATA_ROOT/p when that
// exists; otherwise `p` unchanged (so the error names the original path).
std::filesystem::path resolve_data_path(const std::filesystem::path& p);

// Aligned table followed by the machine-readable line
//   RESULT<TAB>split<TAB>mrr<TAB>hits@1<TAB>hits@3<TAB>hits@10<TAB>n_queries
void print_report(std::ostream& out, const RankingReport& report, const std::string& split);

// Entry point behind the `kge` binary; args exclude the program name.
//
//   preprocess <dataset-dir> [--out DIR]
//   ground <dataset-dir> <rule-file> <out-file>
//   train <config> [--resume CKPT] [--out DIR]
//   eval <checkpoint-dir> [--split valid|test]
//   tune <config> [--strategy grid|random] [--trials N] [--seed S]
//
// Global flags: --threads N, --scalar (force the scalar kernels).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kge
