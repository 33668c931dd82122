#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mpstomo/probability.hpp"

namespace mpstomo {

/// M outcome strings of N quarts, stored row-major.
class SampleSet {
 public:
  SampleSet() = default;
  SampleSet(int n_sites, std::uint64_t seed, std::string state_digest);

  int n_sites() const { return n_; }
  std::size_t size() const { return n_ == 0 ? 0 : data_.size() / n_; }
  std::uint64_t seed() const { return seed_; }
  const std::string& state_digest() const { return digest_; }

  std::span<const std::uint8_t> operator[](std::size_t i) const {
    return {data_.data() + i * n_, static_cast<std::size_t>(n_)};
  }
  void push_back(std::span<const std::uint8_t> outcome);
  /// Samples [begin, end) as a new set sharing the header fields.
  SampleSet slice(std::size_t begin, std::size_t end) const;

  bool operator==(const SampleSet& other) const = default;

 private:
  int n_ = 0;
  std::uint64_t seed_ = 0;
  std::string digest_;
  std::vector<std::uint8_t> data_;
};

inline constexpr std::size_t kSampleBlockSize = 1024;

/// M i.i.d. draws from P(m) / Tr(rho). Block b of the fixed block plan uses
/// the stream derive_seed(seed, b), so the result is independent of workers.
SampleSet sample(const ProbabilityMpo& p, std::size_t count, std::uint64_t seed, int workers = 1,
                 const std::string& state_digest = "");

std::string format_samples(const SampleSet& samples);
SampleSet parse_samples(const std::string& text);
void save_samples(const SampleSet& samples, const std::string& path);
SampleSet load_samples(const std::string& path);

/// Distinct outcomes in lexicographic order with their multiplicities.
struct OutcomeHistogram {
  int n_sites = 0;
  std::vector<Outcome> outcomes;
  std::vector<double> counts;
  double total = 0.0;
};

OutcomeHistogram histogram(const SampleSet& samples);

}  // namespace mpstomo
