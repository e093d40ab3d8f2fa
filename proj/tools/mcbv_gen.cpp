// Writes the bundled corpus: worked examples plus seeded random instances
// from the equality, arithmetic and mixed families.

#include <iostream>

#include "CLI11.hpp"
#include "mcbv/generator.hpp"

int main(int argc, char **argv) {
  std::string dir;
  std::uint64_t seed = 1;
  mcbv::CorpusCounts counts;
  mcbv::GeneratorOptions opts;
  CLI::App app{"Generate the benchmark corpus"};
  app.add_option("dir", dir, "Output directory")->required();
  app.add_option("--seed", seed, "Corpus seed");
  app.add_option("--eq", counts.eq, "Instances in the equality family");
  app.add_option("--arith", counts.arith, "Instances in the arithmetic family");
  app.add_option("--mixed", counts.mixed, "Instances in the mixed family");
  app.add_option("--max-vars", opts.max_vars, "Variables per instance");
  app.add_option("--max-width", opts.max_width, "Largest variable width");
  CLI11_PARSE(app, argc, argv);
  try {
    std::size_t n = mcbv::write_corpus(dir, seed, counts, opts);
    std::cout << "wrote " << n << " files to " << dir << "\n";
  } catch (const std::exception &e) {
    std::cerr << "mcbv-gen: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
