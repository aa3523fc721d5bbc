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

#include "replymatch/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <numeric>
#include <optional>

#include "json.hpp"

namespace replymatch {
namespace {

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool looks_like_url(std::string_view chunk) {
  for (std::string_view prefix : {"http://", "https://", "ftp://", "www."}) {
    if (chunk.starts_with(prefix) && chunk.size() > prefix.size()) return true;
  }
  return false;
}

// Splits text into lines, dropping one trailing '\r' per line. A final line
// without a terminating newline is still returned.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<int> two_digits(std::string_view s) {
  if (s.size() != 2 || !std::isdigit(static_cast<unsigned char>(s[0])) ||
      !std::isdigit(static_cast<unsigned char>(s[1]))) {
    return std::nullopt;
  }
  return (s[0] - '0') * 10 + (s[1] - '0');
}

struct RawLine {
  std::optional<int> clock;  // unset for system notices
  std::string speaker;
  std::string text;
};

RawLine parse_line(std::string_view line, std::size_t line_no) {
  if (line.starts_with("===")) {
    std::string_view body = line.substr(3);
    if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
    return {std::nullopt, std::string(kSystemSpeaker), std::string(body)};
  }
  if (line.size() < 7 || line[0] != '[' || line[3] != ':' || line[6] != ']') {
    throw ParseError("malformed timestamp, expected [HH:MM]", line_no);
  }
  const auto hours = two_digits(line.substr(1, 2));
  const auto minutes = two_digits(line.substr(4, 2));
  if (!hours || !minutes || *hours > 23 || *minutes > 59) {
    throw ParseError("malformed timestamp, expected [HH:MM]", line_no);
  }
  std::string_view rest = line.substr(7);
  if (rest.empty() || rest.front() != ' ') throw ParseError("missing <user> field", line_no);
  rest.remove_prefix(1);
  if (rest.empty() || rest.front() != '<') throw ParseError("missing <user> field", line_no);
  const std::size_t close = rest.find('>');
  if (close == std::string_view::npos || close == 1) {
    throw ParseError("missing <user> field", line_no);
  }
  RawLine out;
  out.clock = *hours * 60 + *minutes;
  out.speaker = std::string(rest.substr(1, close - 1));
  std::string_view body = rest.substr(close + 1);
  if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
  out.text = std::string(body);
  return out;
}

void finish_utterances(ChatLog& log) {
  log.known_users.clear();
  for (const auto& u : log.utterances) {
    if (!u.is_system()) log.known_users.insert(u.speaker);
  }
  for (auto& u : log.utterances) {
    u.tokens = tokenize(u.raw_text);
    u.mentioned_users = detect_mentions(u, log.known_users);
  }
}

std::size_t parse_index(std::string_view field, std::size_t line_no) {
  std::size_t value = 0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || field.empty()) {
    throw ParseError("expected a non-negative integer, got '" + std::string(field) + "'",
                     line_no);
  }
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

std::string_view strip_comment(std::string_view line) {
  const std::size_t hash = line.find('#');
  return trim(hash == std::string_view::npos ? line : line.substr(0, hash));
}

}  // namespace

void LinkSet::add(std::size_t child, std::size_t parent) {
  if (parent > child) {
    throw ValidationError("reply-to link " + std::to_string(child) + " -> " +
                          std::to_string(parent) + " points to the future");
  }
  links_.insert({child, parent});
}

bool LinkSet::contains(std::size_t child, std::size_t parent) const {
  return links_.contains({child, parent});
}

std::vector<std::size_t> LinkSet::parents_of(std::size_t child) const {
  std::vector<std::size_t> parents;
  for (auto it = links_.lower_bound({child, 0}); it != links_.end() && it->child == child; ++it) {
    parents.push_back(it->parent);
  }
  return parents;
}

std::size_t LinkSet::latest_parent(std::size_t child) const {
  const auto parents = parents_of(child);
  if (parents.empty()) {
    throw ValidationError("utterance " + std::to_string(child) + " has no parent");
  }
  return parents.back();
}

bool LinkSet::is_single_parent(std::size_t n) const {
  if (links_.size() != n) return false;
  std::size_t expected = 0;
  for (const auto& link : links_) {
    if (link.child != expected) return false;
    ++expected;
  }
  return true;
}

ThreadPartition::ThreadPartition(std::vector<std::size_t> thread_of)
    : thread_of_(std::move(thread_of)) {}

std::map<std::size_t, std::vector<std::size_t>> ThreadPartition::threads() const {
  std::map<std::size_t, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < thread_of_.size(); ++i) out[thread_of_[i]].push_back(i);
  return out;
}

std::size_t ThreadPartition::thread_count() const {
  return std::set<std::size_t>(thread_of_.begin(), thread_of_.end()).size();
}

std::vector<std::string> tokenize(std::string_view raw_text) {
  std::vector<std::string> tokens;
  const std::string lowered = to_lower(raw_text);
  for (std::string_view chunk : split_fields(lowered)) {
    if (looks_like_url(chunk)) {
      tokens.emplace_back(chunk);
      continue;
    }
    std::size_t lead = 0;
    while (lead < chunk.size() && is_punct(chunk[lead])) ++lead;
    std::size_t tail = chunk.size();
    while (tail > lead && is_punct(chunk[tail - 1])) --tail;
    for (std::size_t k = 0; k < lead; ++k) tokens.emplace_back(1, chunk[k]);
    if (tail > lead) tokens.emplace_back(chunk.substr(lead, tail - lead));
    for (std::size_t k = tail; k < chunk.size(); ++k) tokens.emplace_back(1, chunk[k]);
  }
  return tokens;
}

std::set<std::string> detect_mentions(const Utterance& utt,
                                      const std::set<std::string>& known_users) {
  std::set<std::string> mentioned;
  const std::string head = to_lower(trim(utt.raw_text));
  const std::set<std::string_view> token_set(utt.tokens.begin(), utt.tokens.end());
  for (const auto& user : known_users) {
    if (user.empty() || user == kSystemSpeaker) continue;
    const std::string name = to_lower(user);
    if (token_set.contains(name)) {
      mentioned.insert(user);
      continue;
    }
    if (head.size() > name.size() && head.starts_with(name) &&
        (head[name.size()] == ':' || head[name.size()] == ',')) {
      mentioned.insert(user);
    }
  }
  return mentioned;
}

ChatLog parse_chat_log(std::string_view text, std::string id) {
  ChatLog log;
  log.id = std::move(id);
  std::optional<int> previous_clock;
  int day_offset = 0;
  int last_timestamp = 0;
  const auto lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) continue;
    RawLine raw = parse_line(lines[n], n + 1);
    Utterance u;
    u.index = log.utterances.size();
    if (raw.clock) {
      if (!previous_clock) {
        log.start_clock_min = *raw.clock;
      } else if (*raw.clock < *previous_clock) {
        day_offset += kMinutesPerDay;
      }
      previous_clock = raw.clock;
      last_timestamp = *raw.clock + day_offset - log.start_clock_min;
    }
    u.timestamp_min = last_timestamp;
    u.speaker = std::move(raw.speaker);
    u.raw_text = std::move(raw.text);
    log.utterances.push_back(std::move(u));
  }
  finish_utterances(log);
  return log;
}

std::string serialize_chat_log(const ChatLog& log) {
  std::string out;
  for (const auto& u : log.utterances) {
    if (u.is_system()) {
      out += "===";
      if (!u.raw_text.empty()) out += " " + u.raw_text;
      out += '\n';
      continue;
    }
    const int clock = (log.start_clock_min + u.timestamp_min) % kMinutesPerDay;
    char stamp[16];
    std::snprintf(stamp, sizeof(stamp), "[%02d:%02d] ", clock / 60, clock % 60);
    out += stamp;
    out += "<" + u.speaker + ">";
    if (!u.raw_text.empty()) out += " " + u.raw_text;
    out += '\n';
  }
  return out;
}

std::string write_canonical(const ChatLog& log) {
  std::string out;
  for (const auto& u : log.utterances) {
    nlohmann::ordered_json record;
    record["index"] = u.index;
    record["time"] = log.start_clock_min + u.timestamp_min;
    record["speaker"] = u.speaker;
    record["text"] = u.raw_text;
    out += record.dump();
    out += '\n';
  }
  return out;
}

ChatLog read_canonical(std::string_view text, std::string id) {
  ChatLog log;
  log.id = std::move(id);
  const auto lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(lines[n]);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid record: ") + e.what(), n + 1);
    }
    if (!record.is_object()) throw ParseError("record is not an object", n + 1);
    for (const auto& [key, value] : record.items()) {
      if (key != "index" && key != "time" && key != "speaker" && key != "text") {
        throw ParseError("unknown field '" + key + "'", n + 1);
      }
    }
    try {
      Utterance u;
      u.index = record.at("index").get<std::size_t>();
      const int time = record.at("time").get<int>();
      u.speaker = record.at("speaker").get<std::string>();
      u.raw_text = record.at("text").get<std::string>();
      if (u.index != log.utterances.size()) {
        throw ParseError("index " + std::to_string(u.index) + " out of sequence", n + 1);
      }
      if (log.utterances.empty()) log.start_clock_min = time;
      u.timestamp_min = time - log.start_clock_min;
      log.utterances.push_back(std::move(u));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad field: ") + e.what(), n + 1);
    }
  }
  finish_utterances(log);
  return log;
}

LinkSet parse_annotations(std::string_view text, const ChatLog& log) {
  LinkSet links;
  const auto lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view body = strip_comment(lines[n]);
    if (body.empty()) continue;
    const auto fields = split_fields(body);
    if (fields.size() != 2) throw ParseError("expected 'parent child'", n + 1);
    const std::size_t parent = parse_index(fields[0], n + 1);
    const std::size_t child = parse_index(fields[1], n + 1);
    if (parent >= log.size() || child >= log.size()) {
      throw ValidationError("line " + std::to_string(n + 1) + ": index out of range for log of " +
                            std::to_string(log.size()) + " utterances");
    }
    if (parent > child) {
      throw ValidationError("line " + std::to_string(n + 1) + ": parent " +
                            std::to_string(parent) + " follows child " + std::to_string(child));
    }
    links.add(child, parent);
  }
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (links.parents_of(i).empty()) links.add(i, i);
  }
  return links;
}

std::string format_links(const LinkSet& links) {
  std::string out;
  for (const auto& link : links) {
    out += std::to_string(link.parent) + " " + std::to_string(link.child) + "\n";
  }
  return out;
}

ThreadPartition threads_from_links(const LinkSet& links, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (const auto& link : links) {
    if (link.child >= n) {
      throw ValidationError("link child " + std::to_string(link.child) + " out of range");
    }
    if (++seen[link.child] > 1) {
      throw ValidationError("utterance " + std::to_string(link.child) + " has several parents");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i] == 0) throw ValidationError("utterance " + std::to_string(i) + " has no link");
  }

  return connected_threads(links, n);
}

ThreadPartition connected_threads(const LinkSet& links, std::size_t n) {
  std::vector<std::size_t> root(n);
  std::iota(root.begin(), root.end(), std::size_t{0});
  auto find = [&root](std::size_t x) {
    while (root[x] != x) {
      root[x] = root[root[x]];
      x = root[x];
    }
    return x;
  };
  for (const auto& link : links) {
    if (link.child >= n) {
      throw ValidationError("link child " + std::to_string(link.child) + " out of range");
    }
    const std::size_t a = find(link.child);
    const std::size_t b = find(link.parent);
    if (a != b) root[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> thread_of(n);
  for (std::size_t i = 0; i < n; ++i) thread_of[i] = find(i);
  return ThreadPartition(std::move(thread_of));
}

std::string format_threads(const ThreadPartition& partition) {
  std::string out;
  for (std::size_t i = 0; i < partition.size(); ++i) {
    out += std::to_string(i) + " " + std::to_string(partition.thread_of(i)) + "\n";
  }
  return out;
}

ThreadPartition parse_threads(std::string_view text) {
  std::map<std::size_t, std::size_t> entries;
  const auto lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view body = strip_comment(lines[n]);
    if (body.empty()) continue;
    const auto fields = split_fields(body);
    if (fields.size() != 2) throw ParseError("expected 'index thread_id'", n + 1);
    const std::size_t index = parse_index(fields[0], n + 1);
    if (!entries.emplace(index, parse_index(fields[1], n + 1)).second) {
      throw ParseError("duplicate index " + std::to_string(index), n + 1);
    }
  }
  std::vector<std::size_t> thread_of;
  for (const auto& [index, thread] : entries) {
    if (index != thread_of.size()) {
      throw ValidationError("thread file is missing index " + std::to_string(thread_of.size()));
    }
    thread_of.push_back(thread);
  }
  return ThreadPartition(std::move(thread_of));
}

LinkSet resolve_latest_parents(const LinkSet& gold, std::size_t n, std::size_t k_c) {
  LinkSet resolved;
  for (std::size_t child = 0; child < n; ++child) {
    const auto parents = gold.parents_of(child);
    if (parents.empty()) {
      resolved.add(child, child);
      continue;
    }
    std::size_t chosen = parents.back();
    for (auto it = parents.rbegin(); it != parents.rend(); ++it) {
      if (child - *it < k_c) {
        chosen = *it;
        break;
      }
    }
    resolved.add(child, chosen);
  }
  return resolved;
}

double average_parents(const LinkSet& gold) {
  std::set<std::size_t> children;
  for (const auto& link : gold) children.insert(link.child);
  return children.empty() ? 0.0 : static_cast<double>(gold.size()) / children.size();
}

}  // namespace replymatch
