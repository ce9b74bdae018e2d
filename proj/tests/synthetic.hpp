#pragma once

// Topic-word toy data: positives share tokens with their origin, negatives
// come from a different topic and share none.

#include <algorithm>
#include <string>
#include <vector>

#include "simgpt/corpus.hpp"
#include "simgpt/rng.hpp"
#include "simgpt/sts_eval.hpp"

namespace synthetic {

struct World {
  int topics = 12;
  int words_per_topic = 10;
  int sentence_length = 4;

  std::string word(int topic, int k) const {
    return "t" + std::to_string(topic) + "w" + std::to_string(k);
  }

  std::vector<int> pick(simgpt::Rng& rng, int count, const std::vector<int>& exclude = {}) const {
    std::vector<int> pool;
    for (int k = 0; k < words_per_topic; ++k) {
      if (std::find(exclude.begin(), exclude.end(), k) == exclude.end()) pool.push_back(k);
    }
    rng.shuffle(pool);
    pool.resize(static_cast<std::size_t>(count));
    return pool;
  }

  std::string sentence(int topic, const std::vector<int>& words) const {
    std::string s;
    for (int k : words) s += (s.empty() ? "" : " ") + word(topic, k);
    return s;
  }

  int other_topic(simgpt::Rng& rng, int topic) const {
    return static_cast<int>((topic + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(topics - 1)))) % topics);
  }

  std::vector<simgpt::TrainingTriplet> triplets(std::size_t n, std::uint64_t seed) const {
    simgpt::Rng rng(seed);
    std::vector<simgpt::TrainingTriplet> out;
    for (std::size_t i = 0; i < n; ++i) {
      const int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(topics)));
      const auto origin = pick(rng, sentence_length);
      std::vector<int> positive(origin.begin(), origin.begin() + 2);
      const auto fresh = pick(rng, sentence_length - 2, origin);
      positive.insert(positive.end(), fresh.begin(), fresh.end());
      const int u = other_topic(rng, t);
      out.push_back({sentence(t, origin), sentence(t, positive), sentence(u, pick(rng, sentence_length))});
    }
    return out;
  }

  // Gold levels: 5 same words, 4 three shared, 3 two shared, 2 same topic
  // disjoint words, 0.5 different topics.
  std::vector<simgpt::STSPair> sts_pairs(std::size_t n, std::uint64_t seed) const {
    simgpt::Rng rng(seed);
    std::vector<simgpt::STSPair> out;
    for (std::size_t i = 0; i < n; ++i) {
      const int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(topics)));
      const auto a = pick(rng, sentence_length);
      const auto level = rng.below(5);
      std::vector<int> b;
      double gold = 0.0;
      int tb = t;
      if (level == 0) {
        b = a;
        rng.shuffle(b);
        gold = 5.0;
      } else if (level == 1 || level == 2) {
        const int shared = level == 1 ? 3 : 2;
        b.assign(a.begin(), a.begin() + shared);
        const auto fresh = pick(rng, sentence_length - shared, a);
        b.insert(b.end(), fresh.begin(), fresh.end());
        gold = level == 1 ? 4.0 : 3.0;
      } else if (level == 3) {
        b = pick(rng, std::min(sentence_length, words_per_topic - sentence_length), a);
        gold = 2.0;
      } else {
        tb = other_topic(rng, t);
        b = pick(rng, sentence_length);
        gold = 0.5;
      }
      out.push_back({sentence(t, a), sentence(tb, b), gold});
    }
    return out;
  }

  std::vector<std::string> vocabulary() const {
    std::vector<std::string> v;
    for (int t = 0; t < topics; ++t) {
      for (int k = 0; k < words_per_topic; ++k) v.push_back(word(t, k));
    }
    std::sort(v.begin(), v.end());
    return v;
  }
};

}  // namespace synthetic
