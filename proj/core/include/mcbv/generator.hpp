#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mcbv {

/// Random instance families. Eq and Arith stay inside the grammars of the
/// two dedicated explainers; Mixed uses every supported operator.
enum class Fragment { Eq, Arith, Mixed };

const char *fragment_name(Fragment f);

struct GeneratorOptions {
  unsigned max_vars = 3;
  unsigned max_width = 6;
  unsigned min_atoms = 2;
  unsigned max_atoms = 5;
};

/// SMT-LIB text of one instance; a pure function of its arguments.
std::string random_instance(Fragment f, std::uint64_t seed, const GeneratorOptions &opts = {});

struct NamedInstance {
  std::string name;
  std::string text;
};

/// The worked examples used throughout the test suite, as scripts. Where
/// an example fixes a model, the model is pinned by equalities.
std::vector<NamedInstance> worked_examples();

struct CorpusCounts {
  std::size_t eq = 200;
  std::size_t arith = 200;
  std::size_t mixed = 150;
};

/// Writes examples/, eq/, arith/ and mixed/ under `dir`. Returns the
/// number of files written.
std::size_t write_corpus(const std::filesystem::path &dir, std::uint64_t seed, const CorpusCounts &counts = {},
                         const GeneratorOptions &opts = {});

} // namespace mcbv
