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

#include "corpusqc/review.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace corpusqc::review {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

EventKind parse_kind(const std::string& text, std::size_t line_no) {
  if (text == "submit") return EventKind::kSubmit;
  if (text == "upvote") return EventKind::kUpvote;
  if (text == "downvote") return EventKind::kDownvote;
  throw ReplayError("event log line " + std::to_string(line_no) +
                    ": unknown event kind '" + text + "'");
}

}  // namespace

const char* status_name(Status status) {
  switch (status) {
    case Status::kRejected: return "Rejected";
    case Status::kPending: return "Pending";
    case Status::kVerified: return "Verified";
  }
  return "?";
}

const char* event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::kSubmit: return "submit";
    case EventKind::kUpvote: return "upvote";
    case EventKind::kDownvote: return "downvote";
  }
  return "?";
}

const char* event_error_kind_name(EventErrorKind kind) {
  switch (kind) {
    case EventErrorKind::kOutOfOrder: return "OutOfOrder";
    case EventErrorKind::kDuplicateContribution: return "DuplicateContribution";
    case EventErrorKind::kUnknownContribution: return "UnknownContribution";
    case EventErrorKind::kIneligibleSource: return "IneligibleSource";
    case EventErrorKind::kDuplicateVote: return "DuplicateVote";
  }
  return "?";
}

Status status_of(std::uint32_t upvotes, std::uint32_t downvotes,
                 const Thresholds& thresholds) {
  if (downvotes >= thresholds.max_downvotes_exclusive) return Status::kRejected;
  if (upvotes > thresholds.min_upvotes_exclusive) return Status::kVerified;
  return Status::kPending;
}

bool ReviewState::is_eligible(const std::string& segment_id) const {
  if (seeds_.contains(segment_id)) return true;
  const auto it = contributions_.find(segment_id);
  return it != contributions_.end() && it->second.status == Status::kVerified;
}

std::set<std::string> ReviewState::eligible_sources() const {
  std::set<std::string> out = seeds_;
  for (const auto& [id, record] : contributions_) {
    if (record.status == Status::kVerified) out.insert(id);
  }
  return out;
}

const ContributionRecord* ReviewState::find(const std::string& id) const {
  const auto it = contributions_.find(id);
  return it == contributions_.end() ? nullptr : &it->second;
}

std::optional<EventError> ReviewState::apply_event(const ReviewEvent& event) {
  if (last_seq_ && event.seq <= *last_seq_) {
    return EventError{event.seq, EventErrorKind::kOutOfOrder,
                      "seq " + std::to_string(event.seq) +
                          " not greater than " + std::to_string(*last_seq_)};
  }
  last_seq_ = event.seq;

  if (event.kind == EventKind::kSubmit) {
    if (contributions_.contains(event.contribution_id)) {
      return EventError{event.seq, EventErrorKind::kDuplicateContribution,
                        "contribution '" + event.contribution_id +
                            "' already submitted"};
    }
    if (!is_eligible(event.source_ref)) {
      return EventError{event.seq, EventErrorKind::kIneligibleSource,
                        "source '" + event.source_ref +
                            "' is not an eligible segment"};
    }
    ContributionRecord record;
    record.id = event.contribution_id;
    record.source_ref = event.source_ref;
    record.src_lang = event.src_lang;
    record.tgt_lang = event.tgt_lang;
    record.tgt_text = event.tgt_text;
    record.contributor = event.user;
    record.status = status_of(0, 0, thresholds_);
    const auto parent = contributions_.find(event.source_ref);
    record.depth =
        parent == contributions_.end() ? 1 : parent->second.depth + 1;
    order_.push_back(record.id);
    contributions_.emplace(record.id, std::move(record));
    return std::nullopt;
  }

  const auto it = contributions_.find(event.contribution_id);
  if (it == contributions_.end()) {
    return EventError{event.seq, EventErrorKind::kUnknownContribution,
                      "vote on unknown contribution '" +
                          event.contribution_id + "'"};
  }
  ContributionRecord& record = it->second;
  if (event.user == record.contributor) {
    return EventError{event.seq, EventErrorKind::kDuplicateVote,
                      "self-vote by '" + event.user + "' on '" + record.id +
                          "'"};
  }
  if (!record.voters.insert(event.user).second) {
    return EventError{event.seq, EventErrorKind::kDuplicateVote,
                      "user '" + event.user + "' already voted on '" +
                          record.id + "'"};
  }
  if (event.kind == EventKind::kUpvote) {
    ++record.upvotes;
  } else {
    ++record.downvotes;
  }
  record.status = status_of(record.upvotes, record.downvotes, thresholds_);
  return std::nullopt;
}

ReplayResult replay_log(std::span<const ReviewEvent> events,
                        std::set<std::string> seeds,
                        const Thresholds& thresholds, bool strict) {
  ReplayResult result;
  result.state = ReviewState(std::move(seeds), thresholds);
  result.audit.total_events = events.size();
  for (const ReviewEvent& event : events) {
    if (auto error = result.state.apply_event(event)) {
      if (strict) {
        throw ReplayError("event seq " + std::to_string(error->seq) + ": " +
                          std::string(event_error_kind_name(error->kind)) +
                          ": " + error->message);
      }
      result.audit.errors.push_back(std::move(*error));
    } else {
      ++result.audit.applied_events;
    }
  }

  for (const std::string& id : result.state.submission_order()) {
    const ContributionRecord& record = *result.state.find(id);
    switch (record.status) {
      case Status::kPending: ++result.audit.pending; break;
      case Status::kVerified: ++result.audit.verified; break;
      case Status::kRejected: ++result.audit.rejected; break;
    }
    result.audit.max_depth = std::max(result.audit.max_depth, record.depth);
    ++result.audit.depth_counts[record.depth];
    const ContributionRecord* parent = result.state.find(record.source_ref);
    if (parent && parent->status == Status::kRejected) {
      result.audit.tainted.push_back(id);
    }
  }
  std::sort(result.audit.tainted.begin(), result.audit.tainted.end());
  return result;
}

std::vector<ReviewEvent> parse_event_log(std::istream& in) {
  std::vector<ReviewEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& err) {
      throw ReplayError("event log line " + std::to_string(line_no) + ": " +
                        err.what());
    }
    try {
      ReviewEvent event;
      event.seq = j.at("seq").get<std::uint64_t>();
      event.kind = parse_kind(j.at("kind").get<std::string>(), line_no);
      event.contribution_id = j.at("id").get<std::string>();
      event.user = j.at("user").get<std::string>();
      if (event.kind == EventKind::kSubmit) {
        event.source_ref = j.at("source_ref").get<std::string>();
        event.src_lang = j.value("src_lang", "");
        event.tgt_lang = j.value("tgt_lang", "");
        event.tgt_text = j.value("tgt_text", "");
      }
      events.push_back(std::move(event));
    } catch (const json::exception& err) {
      throw ReplayError("event log line " + std::to_string(line_no) + ": " +
                        err.what());
    }
  }
  return events;
}

nlohmann::ordered_json state_to_json(const ReviewState& state) {
  ordered_json j;
  j["thresholds"] = {
      {"min_upvotes_exclusive", state.thresholds().min_upvotes_exclusive},
      {"max_downvotes_exclusive", state.thresholds().max_downvotes_exclusive}};
  j["seeds"] = state.seeds();
  auto contributions = ordered_json::array();
  for (const std::string& id : state.submission_order()) {
    const ContributionRecord& record = *state.find(id);
    ordered_json c;
    c["id"] = record.id;
    c["source_ref"] = record.source_ref;
    c["src_lang"] = record.src_lang;
    c["tgt_lang"] = record.tgt_lang;
    c["tgt_text"] = record.tgt_text;
    c["contributor"] = record.contributor;
    c["upvotes"] = record.upvotes;
    c["downvotes"] = record.downvotes;
    c["voters"] = record.voters;
    c["status"] = status_name(record.status);
    c["depth"] = record.depth;
    contributions.push_back(std::move(c));
  }
  j["contributions"] = std::move(contributions);
  j["eligible_sources"] = state.eligible_sources();
  return j;
}

nlohmann::ordered_json audit_to_json(const AuditReport& audit) {
  ordered_json j;
  j["total_events"] = audit.total_events;
  j["applied_events"] = audit.applied_events;
  j["status_counts"] = {{"pending", audit.pending},
                        {"verified", audit.verified},
                        {"rejected", audit.rejected}};
  j["max_depth"] = audit.max_depth;
  ordered_json depths = ordered_json::object();
  for (const auto& [depth, count] : audit.depth_counts) {
    depths[std::to_string(depth)] = count;
  }
  j["depth_counts"] = std::move(depths);
  j["tainted"] = audit.tainted;
  auto errors = ordered_json::array();
  for (const EventError& error : audit.errors) {
    errors.push_back({{"seq", error.seq},
                      {"kind", event_error_kind_name(error.kind)},
                      {"message", error.message}});
  }
  j["errors"] = std::move(errors);
  return j;
}

std::string audit_table(const AuditReport& audit) {
  std::ostringstream out;
  out << "events applied      " << audit.applied_events << "/"
      << audit.total_events << "\n";
  out << "pending             " << audit.pending << "\n";
  out << "verified            " << audit.verified << "\n";
  out << "rejected            " << audit.rejected << "\n";
  out << "max depth           " << audit.max_depth << "\n";
  for (const auto& [depth, count] : audit.depth_counts) {
    out << "  depth " << depth << "            " << count << "\n";
  }
  out << "tainted sources     " << audit.tainted.size() << "\n";
  out << "event errors        " << audit.errors.size() << "\n";
  for (const EventError& error : audit.errors) {
    out << "  seq " << error.seq << ": "
        << event_error_kind_name(error.kind) << ": " << error.message << "\n";
  }
  return out.str();
}

}  // namespace corpusqc::review
