#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace acsf {

/// One evaluation point: the configured number of episode returns plus
/// summary statistics. Wall clock is informational and excluded from
/// reproducibility comparisons.
struct EvalRecord {
  std::size_t step = 0;
  std::uint64_t seed = 0;
  std::vector<double> returns;
  double mean = 0.0;
  double stddev = 0.0;  // population std over the episodes
  double wall_clock_s = 0.0;
};

EvalRecord make_eval_record(std::size_t step, std::uint64_t seed,
                            std::vector<double> returns, double wall_clock_s);

/// Columns: step,seed,ep0..ep{k-1},mean,std,wall_clock_s.
void write_eval_csv(const std::filesystem::path& path,
                    const std::vector<EvalRecord>& records);

/// Columns: step,n_seeds,mean,std — mean of per-seed means at each step and
/// the std across seeds. Steps missing from some seeds (early-stopped runs)
/// aggregate over the seeds that reached them.
void write_aggregate_csv(const std::filesystem::path& path,
                         const std::vector<std::vector<EvalRecord>>& per_seed);

/// Pure-text SVG: one polyline per seed, the cross-seed mean, and a
/// mean +- std band. Raw values only; no smoothing is applied to the data
/// files, and the curve drawn here is the unsmoothed mean.
void write_learning_curve_svg(const std::filesystem::path& path,
                              const std::vector<std::vector<EvalRecord>>&
                                  per_seed,
                              const std::string& title);

struct AblationRow {
  std::string label;
  std::string variant;
  std::string coder;
  double max_avg_return = 0.0;  // max over eval points of the seed mean
  double std_at_max = 0.0;      // std across seeds at that point
  std::size_t argmax_step = 0;
};

void write_ablation_csv(const std::filesystem::path& path,
                        const std::vector<AblationRow>& rows);

/// The ablation statistic: maximum over eval points of the across-seed mean
/// return, with the across-seed std at the maximizing point.
AblationRow max_average_return(
    const std::vector<std::vector<EvalRecord>>& per_seed);

struct PowerSection {
  std::string network;
  bool spiking = false;
  double snn_synops = 0.0;  // mean per inference (spiking only)
  std::vector<double> layer_rates;
  std::uint64_t ann_synops = 0;  // matched static count
  double coder_ops = 0.0;        // dense coder multiplies per inference
  std::uint64_t inferences = 0;
};

void write_power_json(const std::filesystem::path& path,
                      const std::vector<PowerSection>& sections,
                      std::size_t timesteps);

std::string format_g17(double x);

}  // namespace acsf
