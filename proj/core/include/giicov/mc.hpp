#pragma once

// Monte Carlo experiment runner. A design fixes a model, a truth, sample sizes, and
// a list of estimation methods; the runner replays it over many synthetic observed
// datasets and reduces the per-replication records into bias, dispersion, coverage,
// and timing summaries plus table files. Replication r draws its observed data and
// its simulation streams from (seed, r), so records depend only on the design, never
// on scheduling; workers claim replications from a shared counter and the reduction
// walks records in index order, which keeps every summary bit-identical across
// thread counts.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "giicov/estimate.hpp"
#include "giicov/models.hpp"

namespace giicov {

struct McDesign {
  ModelKind model = ModelKind::binary_ar;
  Eigen::VectorXd theta0; // empty selects the registry truth for the model
  int n = 200;
  int t_len = 5;
  int replications = 500;
  std::uint64_t seed = 2026;
  int threads = 0; // 0 selects the hardware concurrency
  std::vector<EstimateOptions> methods;
};

// One (replication, method) estimation outcome. failed marks estimates that threw
// or produced non-finite output; those are excluded from the summary moments and
// reported as a count.
struct McRecord {
  int replication = 0;
  int method_index = 0;
  std::string method;
  Eigen::VectorXd theta;
  Eigen::VectorXd se;
  double q = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  double seconds = 0.0;
  bool failed = false;
  std::string error; // diagnostic when the estimate threw
};

struct McMethodSummary {
  std::string method;
  Eigen::VectorXd mbias;   // mean(theta_hat - theta0)
  Eigen::VectorXd ab;      // mean |theta_hat - theta0|
  Eigen::VectorXd std_dev; // sample standard deviation of theta_hat
  Eigen::VectorXd cv95;    // share of records whose +-1.959964 se interval covers theta0
  double mean_seconds = 0.0;
  int used = 0;   // records entering the moments
  int failed = 0; // records excluded
};

struct McSummary {
  std::string model;
  int n = 0;
  int t_len = 0;
  int sim_replications = 0; // simulated paths per estimate, from methods[0]
  int replications = 0;
  std::uint64_t seed = 0;
  Eigen::VectorXd theta0;
  std::vector<std::string> param_names;
  std::vector<McMethodSummary> methods;
};

struct McResult {
  McSummary summary;
  std::vector<McRecord> records; // ordered by (replication, method_index)
};

// Runs every (replication, method) estimate, starting each solver at the design
// truth. Throws config_error on an invalid design; per-replication estimation
// failures are recorded, not thrown.
McResult run_design(const McDesign& design);

// The reduction used by run_design, exposed so summaries can be built from stored
// or synthetic records. Records are grouped by method_index.
McSummary summarize(const McDesign& design, const std::vector<McRecord>& records);

// Share of one method's non-failed records whose +-z * se interval covers theta0,
// per parameter. Records without standard errors are skipped.
Eigen::VectorXd coverage_fraction(const McDesign& design, const std::vector<McRecord>& records,
                                  int method_index, double z);

// Elementwise ratios of summary statistics, method_b's entries relative to
// method_a's. Cells whose denominator is below 1e-12 in magnitude are undefined and
// render as "n/a". Throws std::invalid_argument when the designs behind the two
// summaries differ.
struct RatioCell {
  bool defined = false;
  double value = 0.0;
};

struct RatioTable {
  std::string method_a;
  std::string method_b;
  std::vector<std::string> param_names;
  std::vector<RatioCell> mbias;
  std::vector<RatioCell> std_dev;
};

RatioTable compare_ratio(const McSummary& a, const McSummary& b, int method_a = 0,
                         int method_b = 0);
std::string ratio_cell_text(const RatioCell& cell);
std::string render_ratio_text(const RatioTable& table);

// Table emission. The statistics table holds one row per (model, n, method,
// parameter) and no timing, so reruns of a design are byte-identical; mean elapsed
// seconds go to a separate timing table. Doubles are written with enough digits to
// round-trip exactly.
struct McTableRow {
  std::string model;
  int n = 0;
  int t_len = 0;
  int sim_replications = 0;
  int replications = 0;
  std::string method;
  std::string parameter;
  double theta0 = 0.0;
  double mbias = 0.0;
  double ab = 0.0;
  double std_dev = 0.0;
  double cv95 = 0.0;
  int used = 0;
  int failed = 0;
};

std::vector<McTableRow> table_rows(const std::vector<McSummary>& summaries);
void write_table_csv(const std::vector<McSummary>& summaries, const std::string& path);
std::vector<McTableRow> read_table_csv(const std::string& path);
std::string render_table_text(const std::vector<McSummary>& summaries);

void write_timing_csv(const std::vector<McSummary>& summaries, const std::string& path);
std::string render_timing_text(const std::vector<McSummary>& summaries);

// One JSON object per record: replication, method, theta, se, convergence, timing.
void write_records_jsonl(const std::vector<McRecord>& records, const std::string& path);

} // namespace giicov
