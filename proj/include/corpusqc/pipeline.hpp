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

// Pipeline orchestration: runs the toolkit's stages over configured sources,
// writes artifacts under an output directory, and records a machine-readable
// run summary.  Parallel stages preserve input order, so artifacts are
// byte-identical at any worker count; only the run summary's timings vary.

#ifndef CORPUSQC_PIPELINE_HPP_
#define CORPUSQC_PIPELINE_HPP_

#include <atomic>
#include <chrono>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "corpusqc/config.hpp"
#include "corpusqc/corpus.hpp"

namespace corpusqc::pipeline {

// Applies fn to every item; the result vector preserves input order
// regardless of worker count.  Exceptions from workers are rethrown.
template <typename T, typename Fn>
auto parallel_map_ordered(std::span<T> items, std::size_t workers, Fn fn)
    -> std::vector<std::invoke_result_t<Fn&, T&>> {
  using Result = std::invoke_result_t<Fn&, T&>;
  std::vector<Result> results(items.size());
  if (workers <= 1 || items.size() <= 1) {
    for (std::size_t i = 0; i < items.size(); ++i) results[i] = fn(items[i]);
    return results;
  }
  constexpr std::size_t kChunk = 64;
  std::atomic<std::size_t> cursor{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    try {
      while (true) {
        const std::size_t begin = cursor.fetch_add(kChunk);
        if (begin >= items.size()) return;
        const std::size_t end = std::min(items.size(), begin + kChunk);
        for (std::size_t i = begin; i < end; ++i) results[i] = fn(items[i]);
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
      cursor.store(items.size());  // drain remaining work
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return results;
}

// Worker-count precedence: command-line flag (nonzero), then the
// CORPUSQC_WORKERS environment variable, then the config value.
std::size_t resolve_workers(std::size_t flag_value,
                            const config::PipelineConfig& config);

struct StageStats {
  std::string name;
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t dropped = 0;    // dedup duplicates
  std::size_t malformed = 0;  // unparseable input lines
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t skipped = 0;    // records in groups with no fitted model
  double duration_ms = 0.0;
};

struct RunSummary {
  std::string command;
  std::size_t workers = 1;
  std::string started_at;  // UTC, ISO 8601
  double duration_ms = 0.0;
  std::vector<StageStats> stages;
  std::vector<std::string> artifacts;  // paths relative to the output dir
  std::vector<std::string> errors;

  const StageStats* stage(const std::string& name) const;
  // Includes a reconciliation block proving the counts add up:
  // lines = records + malformed + blank; records = kept + duplicates;
  // kept = accepted + rejected + skipped (when validation ran).
  nlohmann::ordered_json to_json() const;
};

struct EvalSet {
  std::string language;
  std::string hyp_path;
  std::string ref_path;
};

class Runner {
 public:
  Runner(config::PipelineConfig config, std::filesystem::path out_dir,
         std::size_t workers);

  RunSummary run_normalize();
  RunSummary run_validate();
  RunSummary run_review_replay();
  RunSummary run_manifest();
  RunSummary run_eval(const std::string& system,
                      std::span<const EvalSet> sets);
  RunSummary run_compare(std::span<const std::string> report_paths,
                         const std::string& baseline);
  // normalize -> validate -> manifest (when an inventory is configured).
  RunSummary run_pipeline();

  const std::filesystem::path& out_dir() const { return out_dir_; }

 private:
  struct Ingested {
    std::vector<corpus::DatasetRecord> records;
    std::vector<corpus::MalformedLine> malformed;
    corpus::DedupReport dedup;
    std::size_t lines_read = 0;
  };

  Ingested ingest(RunSummary& summary);
  void normalize_stage(Ingested& data, RunSummary& summary);
  void validate_stage(std::vector<corpus::DatasetRecord>& records,
                      RunSummary& summary);
  void manifest_stage(RunSummary& summary);
  void write_text(const std::string& name, const std::string& content,
                  RunSummary& summary);
  void write_json(const std::string& name, const nlohmann::ordered_json& j,
                  RunSummary& summary);
  void finish(RunSummary& summary);

  config::PipelineConfig config_;
  std::filesystem::path out_dir_;
  std::size_t workers_ = 1;
  std::chrono::steady_clock::time_point run_start_;
};

}  // namespace corpusqc::pipeline

#endif  // CORPUSQC_PIPELINE_HPP_
