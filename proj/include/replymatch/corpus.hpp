// Copyright 2026 The replymatch Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Chat-log data model, ingestion, and thread recovery from reply-to links.
//
// Log files hold one message per line, `[HH:MM] <user> body`. Lines that
// start with `===` are system notices; they keep their position (so
// annotation indices stay aligned) and carry the sentinel speaker "==".

#ifndef REPLYMATCH_CORPUS_HPP_
#define REPLYMATCH_CORPUS_HPP_

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "replymatch/errors.hpp"

namespace replymatch {

inline constexpr std::string_view kSystemSpeaker = "==";
inline constexpr int kMinutesPerDay = 1440;

struct Utterance {
  std::size_t index = 0;
  // Minutes since the first message, unwrapped across midnight.
  int timestamp_min = 0;
  std::string speaker;
  std::string raw_text;
  std::vector<std::string> tokens;
  std::set<std::string> mentioned_users;

  bool is_system() const { return speaker == kSystemSpeaker; }
};

struct ChatLog {
  std::string id;
  std::vector<Utterance> utterances;
  // Speakers of non-notice lines.
  std::set<std::string> known_users;
  // Wall clock (minutes after midnight) of the first message.
  int start_clock_min = 0;

  std::size_t size() const { return utterances.size(); }
  const Utterance& operator[](std::size_t i) const { return utterances[i]; }
};

/// Reply-to edge: `child` answers `parent`. A self-link starts a thread.
struct Link {
  std::size_t child = 0;
  std::size_t parent = 0;

  auto operator<=>(const Link&) const = default;
};

class LinkSet {
 public:
  LinkSet() = default;

  /// Throws ValidationError when parent > child.
  void add(std::size_t child, std::size_t parent);
  bool contains(std::size_t child, std::size_t parent) const;

  /// Parents of `child` in ascending order.
  std::vector<std::size_t> parents_of(std::size_t child) const;
  /// Largest parent of `child`; throws ValidationError when none.
  std::size_t latest_parent(std::size_t child) const;

  std::size_t size() const { return links_.size(); }
  bool empty() const { return links_.empty(); }
  const std::set<Link>& links() const { return links_; }
  auto begin() const { return links_.begin(); }
  auto end() const { return links_.end(); }

  /// True when every index in [0, n) has exactly one link and no other
  /// children appear.
  bool is_single_parent(std::size_t n) const;

  bool operator==(const LinkSet&) const = default;

 private:
  std::set<Link> links_;
};

class ThreadPartition {
 public:
  ThreadPartition() = default;
  explicit ThreadPartition(std::vector<std::size_t> thread_of);

  std::size_t size() const { return thread_of_.size(); }
  std::size_t thread_of(std::size_t i) const { return thread_of_[i]; }
  const std::vector<std::size_t>& labels() const { return thread_of_; }

  /// Thread id -> ascending member indices.
  std::map<std::size_t, std::vector<std::size_t>> threads() const;
  std::size_t thread_count() const;

  bool operator==(const ThreadPartition&) const = default;

 private:
  std::vector<std::size_t> thread_of_;
};

/// Lowercased tokens: whitespace split, leading and trailing punctuation
/// peeled off as one-character tokens, URLs kept whole.
std::vector<std::string> tokenize(std::string_view raw_text);

/// Users named by a token (case-insensitive) or addressed as `name:` /
/// `name,` at the start of the message.
std::set<std::string> detect_mentions(const Utterance& utt,
                                      const std::set<std::string>& known_users);

/// Throws ParseError naming the 1-based line on malformed input.
ChatLog parse_chat_log(std::string_view text, std::string id = {});

/// Inverse of parse_chat_log on well-formed logs (byte-identical).
std::string serialize_chat_log(const ChatLog& log);

/// Canonical interchange: one JSON object per line with keys index, time
/// (unwrapped wall-clock minutes), speaker, text.
std::string write_canonical(const ChatLog& log);
ChatLog read_canonical(std::string_view text, std::string id = {});

/// `parent child` per line, `#` comments. Utterances never named as a child
/// receive a self-link.
LinkSet parse_annotations(std::string_view text, const ChatLog& log);

/// Writes `parent child` lines ordered by child then parent.
std::string format_links(const LinkSet& links);

/// Connected components of a one-parent-per-index link set. Thread ids are
/// the smallest member index. Throws ValidationError on a missing or
/// duplicate link.
ThreadPartition threads_from_links(const LinkSet& links, std::size_t n);

/// Connected components of any link set (several parents allowed); ids are
/// the smallest member index. Indices without links become singletons.
ThreadPartition connected_threads(const LinkSet& links, std::size_t n);

/// `index thread_id` per line.
std::string format_threads(const ThreadPartition& partition);
ThreadPartition parse_threads(std::string_view text);

/// One link per UOI: the latest gold parent within the k_c-window ending at
/// the UOI, or the latest parent overall when none is in the window.
LinkSet resolve_latest_parents(const LinkSet& gold, std::size_t n, std::size_t k_c);

/// Mean number of gold links per utterance that has at least one.
double average_parents(const LinkSet& gold);

}  // namespace replymatch

#endif  // REPLYMATCH_CORPUS_HPP_
