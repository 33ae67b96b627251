#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

// Batch experiment runner: reproducible seeds, atomic artifact emission,
// manifests, and deterministic sharded parallelism.

namespace fol {

// Runs fn(shard) for shard in [0, n) on up to `jobs` threads; results are
// stored per shard and merged in shard order, so the outcome does not
// depend on scheduling.
template <class Result>
std::vector<Result> parallel_shards(int n, int jobs,
                                    const std::function<Result(int)>& fn) {
  std::vector<Result> results(n);
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) results[i] = fn(i);
    return results;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  int workers = std::min(jobs, n);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) return;
        results[i] = fn(i);
      }
    });
  for (auto& t : pool) t.join();
  return results;
}

int default_jobs();  // --jobs flag value or FOLISCOPE_JOBS or hardware

// write via temp file + rename so partially written artifacts never exist
void atomic_write(const std::filesystem::path& path, const std::string& body);

uint64_t fnv1a_hash(const std::string& s);

struct ExperimentConfig {
  std::string experiment;
  std::string foliation = "jouanolou:2";  // preset or file path
  std::string out_dir = "out";
  uint64_t seed = 1;
  long steps = 1000000;
  double dt = 1e-3;
  double r = 0.9;
  int grid = 128;
  int jobs = 0;  // 0 = default_jobs()
  std::string lambda_schedule = "2,4,8,16,32";
  std::string eta = "0+1i";
  std::string s_range = "1:6:0.5";
  double epsilon = 0.05;
  double eps0 = 0.1;
  std::string window;  // "chart:cxre,cxim,cyre,cyim,radius" or empty
  std::string t1, t2;  // cloud csv paths for density

  std::string canonical_json() const;
  uint64_t hash() const { return fnv1a_hash(canonical_json()); }
};

// Runs one experiment; artifacts land in out_dir together with a manifest
// recording the config hash.  A rerun with the same config and complete
// artifacts is skipped (idempotent).  Returns the process exit status.
int run_experiment(const ExperimentConfig& cfg);

}  // namespace fol
