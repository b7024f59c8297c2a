#ifndef QESA_SAMPLES_HPP
#define QESA_SAMPLES_HPP

#include <cstdint>
#include <map>
#include <string>

#include "error.hpp"

namespace qesa {

// Measurement histogram. Keys are bitstrings with vertex 0 leftmost;
// std::map keeps iteration order (and therefore every consumer) deterministic.
struct sample_set {
  std::size_t n = 0;
  std::uint64_t shots = 0;
  std::map<std::string, std::uint64_t> counts;

  void validate() const {
    std::uint64_t total = 0;
    for (const auto &[bits, c] : counts) {
      require(bits.size() == n, "sample bitstring '" + bits + "' has length " + std::to_string(bits.size()) +
                                    ", expected " + std::to_string(n));
      require(bits.find_first_not_of("01") == std::string::npos, "sample bitstring '" + bits + "' is not binary");
      require(c > 0, "sample counts must be positive");
      total += c;
    }
    require(total == shots, "sample counts sum to " + std::to_string(total) + " but shots = " + std::to_string(shots));
  }
};

} // namespace qesa

#endif // QESA_SAMPLES_HPP
