#include "acsf/results.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "acsf/run_config.hpp"

namespace acsf {

std::string format_g17(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

EvalRecord make_eval_record(std::size_t step, std::uint64_t seed,
                            std::vector<double> returns, double wall_clock_s) {
  EvalRecord r;
  r.step = step;
  r.seed = seed;
  r.returns = std::move(returns);
  double sum = 0.0;
  for (double x : r.returns) sum += x;
  r.mean = r.returns.empty() ? 0.0 : sum / double(r.returns.size());
  double var = 0.0;
  for (double x : r.returns) var += (x - r.mean) * (x - r.mean);
  r.stddev = r.returns.empty() ? 0.0 : std::sqrt(var / double(r.returns.size()));
  r.wall_clock_s = wall_clock_s;
  return r;
}

namespace {
std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("results: cannot open " + path.string());
  return os;
}
}  // namespace

void write_eval_csv(const std::filesystem::path& path,
                    const std::vector<EvalRecord>& records) {
  auto os = open_out(path);
  const std::size_t episodes = records.empty() ? 10 : records[0].returns.size();
  os << "step,seed";
  for (std::size_t i = 0; i < episodes; ++i) os << ",ep" << i;
  os << ",mean,std,wall_clock_s\n";
  for (const EvalRecord& r : records) {
    os << r.step << "," << r.seed;
    for (double x : r.returns) os << "," << format_g17(x);
    os << "," << format_g17(r.mean) << "," << format_g17(r.stddev) << ","
       << format_g17(r.wall_clock_s) << "\n";
  }
}

namespace {

struct StepAgg {
  std::vector<double> means;  // one per seed that reached this step
};

std::map<std::size_t, StepAgg> aggregate(
    const std::vector<std::vector<EvalRecord>>& per_seed) {
  std::map<std::size_t, StepAgg> by_step;
  for (const auto& series : per_seed)
    for (const EvalRecord& r : series) by_step[r.step].means.push_back(r.mean);
  return by_step;
}

}  // namespace

void write_aggregate_csv(const std::filesystem::path& path,
                         const std::vector<std::vector<EvalRecord>>& per_seed) {
  auto os = open_out(path);
  os << "step,n_seeds,mean,std\n";
  for (const auto& [step, agg] : aggregate(per_seed)) {
    double mean = 0.0;
    for (double m : agg.means) mean += m;
    mean /= double(agg.means.size());
    double var = 0.0;
    for (double m : agg.means) var += (m - mean) * (m - mean);
    const double sd = std::sqrt(var / double(agg.means.size()));
    os << step << "," << agg.means.size() << "," << format_g17(mean) << ","
       << format_g17(sd) << "\n";
  }
}

AblationRow max_average_return(
    const std::vector<std::vector<EvalRecord>>& per_seed) {
  AblationRow row;
  bool first = true;
  for (const auto& [step, agg] : aggregate(per_seed)) {
    double mean = 0.0;
    for (double m : agg.means) mean += m;
    mean /= double(agg.means.size());
    if (first || mean > row.max_avg_return) {
      first = false;
      row.max_avg_return = mean;
      row.argmax_step = step;
      double var = 0.0;
      for (double m : agg.means) var += (m - mean) * (m - mean);
      row.std_at_max = std::sqrt(var / double(agg.means.size()));
    }
  }
  return row;
}

void write_ablation_csv(const std::filesystem::path& path,
                        const std::vector<AblationRow>& rows) {
  auto os = open_out(path);
  os << "label,variant,coder,max_avg_return,std,argmax_step\n";
  for (const AblationRow& r : rows)
    os << r.label << "," << r.variant << "," << r.coder << ","
       << format_g17(r.max_avg_return) << "," << format_g17(r.std_at_max)
       << "," << r.argmax_step << "\n";
}

// ---------------------------------------------------------------------------
// SVG learning curves

namespace {

struct PlotBox {
  double x0 = 70, y0 = 40, width = 780, height = 420;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;

  double px(double x) const {
    return x0 + (x - xmin) / (xmax - xmin + 1e-300) * width;
  }
  double py(double y) const {
    return y0 + height - (y - ymin) / (ymax - ymin + 1e-300) * height;
  }
};

std::string polyline(const std::vector<std::pair<double, double>>& pts,
                     const PlotBox& box, const std::string& stroke,
                     double width, double opacity) {
  std::ostringstream os;
  os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
     << width << "\" opacity=\"" << opacity << "\" points=\"";
  for (const auto& [x, y] : pts) os << box.px(x) << "," << box.py(y) << " ";
  os << "\"/>\n";
  return os.str();
}

}  // namespace

void write_learning_curve_svg(
    const std::filesystem::path& path,
    const std::vector<std::vector<EvalRecord>>& per_seed,
    const std::string& title) {
  auto os = open_out(path);
  PlotBox box;

  bool any = false;
  for (const auto& series : per_seed)
    for (const EvalRecord& r : series) {
      if (!any) {
        box.xmin = box.xmax = double(r.step);
        box.ymin = box.ymax = r.mean;
        any = true;
      }
      box.xmin = std::min(box.xmin, double(r.step));
      box.xmax = std::max(box.xmax, double(r.step));
      box.ymin = std::min(box.ymin, r.mean - r.stddev);
      box.ymax = std::max(box.ymax, r.mean + r.stddev);
    }
  if (!any) {
    box.xmin = 0;
    box.xmax = 1;
    box.ymin = 0;
    box.ymax = 1;
  }
  const double ypad = 0.05 * (box.ymax - box.ymin + 1e-12);
  box.ymin -= ypad;
  box.ymax += ypad;

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" "
        "height=\"520\" viewBox=\"0 0 900 520\">\n";
  os << "<rect width=\"900\" height=\"520\" fill=\"white\"/>\n";
  os << "<text x=\"450\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"16\">" << title << "</text>\n";

  // Axes.
  os << "<line x1=\"" << box.x0 << "\" y1=\"" << box.y0 + box.height
     << "\" x2=\"" << box.x0 + box.width << "\" y2=\"" << box.y0 + box.height
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << box.x0 << "\" y1=\"" << box.y0 << "\" x2=\"" << box.x0
     << "\" y2=\"" << box.y0 + box.height << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << box.x0 << "\" y=\"" << box.y0 + box.height + 28
     << "\" font-family=\"sans-serif\" font-size=\"12\">" << std::size_t(box.xmin)
     << "</text>\n";
  os << "<text x=\"" << box.x0 + box.width << "\" y=\""
     << box.y0 + box.height + 28
     << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
     << std::size_t(box.xmax) << "</text>\n";
  os << "<text x=\"" << box.x0 - 8 << "\" y=\"" << box.py(box.ymin + ypad)
     << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
     << box.ymin + ypad << "</text>\n";
  os << "<text x=\"" << box.x0 - 8 << "\" y=\"" << box.py(box.ymax - ypad)
     << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
     << box.ymax - ypad << "</text>\n";
  os << "<text x=\"" << box.x0 + box.width / 2 << "\" y=\""
     << box.y0 + box.height + 28
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"12\">environment steps</text>\n";

  // Mean +- std band across seeds.
  auto by_step = aggregate(per_seed);
  std::vector<std::pair<double, double>> mean_pts, hi_pts, lo_pts;
  for (const auto& [step, agg] : by_step) {
    double mean = 0.0;
    for (double m : agg.means) mean += m;
    mean /= double(agg.means.size());
    double var = 0.0;
    for (double m : agg.means) var += (m - mean) * (m - mean);
    const double sd = std::sqrt(var / double(agg.means.size()));
    mean_pts.emplace_back(double(step), mean);
    hi_pts.emplace_back(double(step), mean + sd);
    lo_pts.emplace_back(double(step), mean - sd);
  }
  if (!mean_pts.empty()) {
    std::ostringstream band;
    band << "<polygon fill=\"#4477aa\" opacity=\"0.18\" points=\"";
    for (const auto& [x, y] : hi_pts) band << box.px(x) << "," << box.py(y)
                                           << " ";
    for (auto it = lo_pts.rbegin(); it != lo_pts.rend(); ++it)
      band << box.px(it->first) << "," << box.py(it->second) << " ";
    band << "\"/>\n";
    os << band.str();
  }

  static const char* kSeedColors[] = {"#999999", "#bb8844", "#88aa66",
                                      "#aa6688", "#6688aa"};
  for (std::size_t s = 0; s < per_seed.size(); ++s) {
    std::vector<std::pair<double, double>> pts;
    for (const EvalRecord& r : per_seed[s])
      pts.emplace_back(double(r.step), r.mean);
    if (!pts.empty())
      os << polyline(pts, box, kSeedColors[s % 5], 1.0, 0.6);
  }
  if (!mean_pts.empty()) os << polyline(mean_pts, box, "#114488", 2.0, 1.0);

  os << "</svg>\n";
}

void write_power_json(const std::filesystem::path& path,
                      const std::vector<PowerSection>& sections,
                      std::size_t timesteps) {
  nlohmann::json j;
  j["timesteps"] = timesteps;
  // Counting conventions: spiking cost = emitted spikes x outgoing synapses,
  // summed over the window; conventional cost = fan_in x neurons, once per
  // inference. Coder multiplies are reported separately.
  j["snn_convention"] = "sum_t sum_l sum_j fan_out(j,l) * spike(j,l,t)";
  j["ann_convention"] = "sum_l fan_in(l) * neurons(l)";
  nlohmann::json arr = nlohmann::json::array();
  for (const PowerSection& s : sections) {
    nlohmann::json e;
    e["network"] = s.network;
    e["spiking"] = s.spiking;
    if (s.spiking) {
      e["snn_synops_per_inference"] = s.snn_synops;
      e["layer_mean_spike_rates"] = s.layer_rates;
      e["coder_ops_per_inference"] = s.coder_ops;
    }
    e["ann_synops"] = s.ann_synops;
    e["inferences"] = s.inferences;
    arr.push_back(std::move(e));
  }
  j["networks"] = std::move(arr);
  auto os = open_out(path);
  os << j.dump(2) << "\n";
}

}  // namespace acsf
