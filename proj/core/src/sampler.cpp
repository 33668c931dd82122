#include "mpstomo/sampler.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "mpstomo/error.hpp"
#include "mpstomo/parallel.hpp"
#include "mpstomo/rng.hpp"

namespace mpstomo {

SampleSet::SampleSet(int n_sites, std::uint64_t seed, std::string state_digest)
    : n_(n_sites), seed_(seed), digest_(std::move(state_digest)) {
  if (n_sites < 1) throw ArgumentError("sample set needs at least one site");
}

void SampleSet::push_back(std::span<const std::uint8_t> outcome) {
  if (static_cast<int>(outcome.size()) != n_) throw ArgumentError("outcome length mismatch");
  for (auto v : outcome) {
    if (v > 3) throw ArgumentError("outcome symbols must be 0..3");
  }
  data_.insert(data_.end(), outcome.begin(), outcome.end());
}

SampleSet SampleSet::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw ArgumentError("sample slice out of range");
  SampleSet out(n_, seed_, digest_);
  out.data_.assign(data_.begin() + begin * n_, data_.begin() + end * n_);
  return out;
}

SampleSet sample(const ProbabilityMpo& p, std::size_t count, std::uint64_t seed, int workers,
                 const std::string& state_digest) {
  if (count < 1) throw ArgumentError("sample count must be at least 1");
  if (!(p.trace() > 0.0)) throw IntegrityError("cannot sample a state with Tr(rho) <= 0");
  const int n = p.n_sites();
  const auto blocks = block_plan(count, kSampleBlockSize);
  std::vector<std::uint8_t> data(count * n);
  parallel_for(blocks.size(), workers, [&](std::size_t b) {
    const Block& block = blocks[b];
    Rng rng(seed, block.index);
    for (std::size_t k = block.begin; k < block.end; ++k) {
      const Outcome o = p.draw([&] { return rng.uniform(); });
      std::copy(o.begin(), o.end(), data.begin() + k * n);
    }
  });
  SampleSet out(n, seed, state_digest);
  for (std::size_t k = 0; k < count; ++k) out.push_back({data.data() + k * n, static_cast<std::size_t>(n)});
  return out;
}

namespace {

constexpr const char* kHeaderTag = "#mpstomo-samples v1";

}  // namespace

std::string format_samples(const SampleSet& samples) {
  std::string out = std::string(kHeaderTag) + " n=" + std::to_string(samples.n_sites()) +
                    " seed=" + std::to_string(samples.seed()) + " state=" + samples.state_digest() + "\n";
  out.reserve(out.size() + samples.size() * (samples.n_sites() + 1));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out += format_outcome(samples[i]);
    out += '\n';
  }
  return out;
}

SampleSet parse_samples(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind(kHeaderTag, 0) != 0) {
    throw ArgumentError("sample file is missing the '#mpstomo-samples v1' header");
  }
  int n = -1;
  std::uint64_t seed = 0;
  std::string digest;
  std::istringstream header(line.substr(std::string(kHeaderTag).size()));
  std::string field;
  while (header >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw ArgumentError("malformed sample header field '" + field + "'");
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    try {
      if (key == "n") {
        n = std::stoi(value);
      } else if (key == "seed") {
        seed = std::stoull(value);
      } else if (key == "state") {
        digest = value;
      }
    } catch (const std::exception&) {
      throw ArgumentError("malformed sample header value '" + field + "'");
    }
  }
  if (n < 1) throw ArgumentError("sample header lacks a positive n");
  SampleSet out(n, seed, digest);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const Outcome o = parse_outcome(line);
    if (static_cast<int>(o.size()) != n) {
      throw ArgumentError("sample line '" + line + "' does not have " + std::to_string(n) + " symbols");
    }
    out.push_back(o);
  }
  return out;
}

void save_samples(const SampleSet& samples, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write sample file '" + path + "'");
  out << format_samples(samples);
}

SampleSet load_samples(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open sample file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_samples(buf.str());
}

OutcomeHistogram histogram(const SampleSet& samples) {
  OutcomeHistogram h;
  h.n_sites = samples.n_sites();
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    const auto x = samples[a];
    const auto y = samples[b];
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
  };
  std::stable_sort(order.begin(), order.end(), less);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto o = samples[order[k]];
    if (h.outcomes.empty() || !std::equal(o.begin(), o.end(), h.outcomes.back().begin())) {
      h.outcomes.emplace_back(o.begin(), o.end());
      h.counts.push_back(0.0);
    }
    h.counts.back() += 1.0;
  }
  h.total = static_cast<double>(samples.size());
  return h;
}

}  // namespace mpstomo
