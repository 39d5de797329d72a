#pragma once

#include <string>
#include <vector>

namespace testing {

std::string corpus_path(const std::string& name);
std::string slurp(const std::string& path);

/// Non-blank, non-comment lines of a `.terms` file.
std::vector<std::string> corpus_terms(const std::string& name);

struct CorpusPair {
  bool expected;
  std::string lhs, rhs;
};

/// Lines `yes: t1 | t2` or `no: t1 | t2` of a `.pairs` file.
std::vector<CorpusPair> corpus_pairs(const std::string& name);

}  // namespace testing
