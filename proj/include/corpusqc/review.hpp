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

// Replay of crowd-review vote logs: contributions are Submitted against an
// eligible source segment (a seed or a previously verified contribution),
// then voted on.  Status is recomputed after every vote, so verification is
// revocable.  Replay produces the final state plus an audit describing the
// derivation-depth growth profile and any events that could not be applied.

#ifndef CORPUSQC_REVIEW_HPP_
#define CORPUSQC_REVIEW_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "corpusqc/errors.hpp"

namespace corpusqc::review {

// Ordered so that status comparisons mirror "more approval": a contribution's
// status never decreases when an upvote lands, never increases on a downvote.
enum class Status { kRejected = 0, kPending = 1, kVerified = 2 };

const char* status_name(Status status);

struct Thresholds {
  // Verified requires upvotes strictly above this bound (default: > 5).
  std::uint32_t min_upvotes_exclusive = 5;
  // Rejected once downvotes reach this bound (default: >= 3).
  std::uint32_t max_downvotes_exclusive = 3;
};

// Rejection dominates: a heavily downvoted contribution is Rejected no matter
// how many upvotes it has collected.
Status status_of(std::uint32_t upvotes, std::uint32_t downvotes,
                 const Thresholds& thresholds = {});

enum class EventKind { kSubmit, kUpvote, kDownvote };

const char* event_kind_name(EventKind kind);

struct ReviewEvent {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kSubmit;
  std::string contribution_id;
  std::string user;
  // Submit payload; ignored for votes.
  std::string source_ref;
  std::string src_lang;
  std::string tgt_lang;
  std::string tgt_text;
};

struct ContributionRecord {
  std::string id;
  std::string source_ref;
  std::string src_lang;
  std::string tgt_lang;
  std::string tgt_text;
  std::string contributor;
  std::uint32_t upvotes = 0;
  std::uint32_t downvotes = 0;
  std::set<std::string> voters;
  Status status = Status::kPending;
  std::uint32_t depth = 1;
};

enum class EventErrorKind {
  kOutOfOrder,
  kDuplicateContribution,
  kUnknownContribution,
  kIneligibleSource,
  kDuplicateVote,
};

const char* event_error_kind_name(EventErrorKind kind);

struct EventError {
  std::uint64_t seq = 0;
  EventErrorKind kind = EventErrorKind::kOutOfOrder;
  std::string message;
};

// Raised in strict replay mode for the first event that fails to apply, and
// by the event-log parser for malformed input.
class ReplayError : public Error {
 public:
  explicit ReplayError(const std::string& what) : Error(what) {}
};

class ReviewState {
 public:
  ReviewState() = default;
  ReviewState(std::set<std::string> seeds, Thresholds thresholds)
      : seeds_(std::move(seeds)), thresholds_(thresholds) {}

  // Applies one event; on failure the state is unchanged (except that the
  // sequence cursor advances for any in-order event) and the error is
  // returned instead.
  std::optional<EventError> apply_event(const ReviewEvent& event);

  // A segment may source new work if it is a seed or a currently Verified
  // contribution.  Evaluated against current statuses.
  bool is_eligible(const std::string& segment_id) const;
  std::set<std::string> eligible_sources() const;

  const std::set<std::string>& seeds() const { return seeds_; }
  const Thresholds& thresholds() const { return thresholds_; }
  const std::vector<std::string>& submission_order() const { return order_; }
  const ContributionRecord* find(const std::string& id) const;
  std::size_t size() const { return contributions_.size(); }

 private:
  std::set<std::string> seeds_;
  Thresholds thresholds_;
  std::unordered_map<std::string, ContributionRecord> contributions_;
  std::vector<std::string> order_;
  std::optional<std::uint64_t> last_seq_;
};

struct AuditReport {
  std::size_t total_events = 0;
  std::size_t applied_events = 0;
  std::size_t pending = 0;
  std::size_t verified = 0;
  std::size_t rejected = 0;
  std::uint32_t max_depth = 0;
  // depth -> number of contributions at that depth (seeds, depth 0, are not
  // contributions and are excluded).
  std::map<std::uint32_t, std::size_t> depth_counts;
  // Contributions whose source was eligible at Submit time but has since been
  // rejected.  They are kept, not cascaded away.
  std::vector<std::string> tainted;
  std::vector<EventError> errors;
};

struct ReplayResult {
  ReviewState state;
  AuditReport audit;
};

// Replays an event log from scratch.  Per-event failures are collected into
// the audit; with strict=true the first failure raises ReplayError instead.
ReplayResult replay_log(std::span<const ReviewEvent> events,
                        std::set<std::string> seeds,
                        const Thresholds& thresholds = {},
                        bool strict = false);

// Reads one JSON event per line: {"seq":..,"kind":"submit|upvote|downvote",
// "id":..,"user":..} plus source_ref/src_lang/tgt_lang/tgt_text for submits.
// Blank lines are skipped.  Raises ReplayError with the offending line number.
std::vector<ReviewEvent> parse_event_log(std::istream& in);

nlohmann::ordered_json state_to_json(const ReviewState& state);
nlohmann::ordered_json audit_to_json(const AuditReport& audit);
std::string audit_table(const AuditReport& audit);

}  // namespace corpusqc::review

#endif  // CORPUSQC_REVIEW_HPP_
