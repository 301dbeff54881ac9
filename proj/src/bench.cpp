#include "levyest/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <variant>

#include "levyest/estimator.hpp"
#include "levyest/rng.hpp"

namespace levyest {
namespace {

// Runs fn(0..n_tasks-1) on up to `threads` workers. Tasks own disjoint
// output slots, so the schedule never changes the results.
void parallel_for(int n_tasks, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) {
    const unsigned hc = std::thread::hardware_concurrency();
    threads = hc == 0 ? 1 : static_cast<int>(hc);
  }
  threads = std::min(threads, n_tasks);
  if (threads <= 1) {
    for (int i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_tasks) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string scheme_kind(const SamplingScheme& s) {
  if (std::holds_alternative<RegularScheme>(s)) return "regular";
  if (std::holds_alternative<IrregularScheme>(s)) return "irregular";
  return "power_decay";
}

double scheme_n_delta_bar(const SamplingScheme& s) {
  const auto intervals = scheme_intervals(s);
  double sum = 0.0;
  for (double d : intervals) sum += d;
  return sum;
}

// The grid actually used by an experiment: rebuilt from n delta_bar when
// auto_m is on, the configured one otherwise.
BandwidthGrid resolve_grid(const ExperimentSpec& spec, double n_delta_bar) {
  if (!spec.auto_m) return spec.config.grid;
  const std::size_t m = BandwidthGrid::default_m(n_delta_bar);
  if (spec.config.grid.rule() == "theory") return BandwidthGrid::theory(m);
  return BandwidthGrid::simulation(m);
}

void validate_spec(const ExperimentSpec& spec) {
  validate_scheme(spec.scheme);
  if (!(spec.eval_lo < spec.eval_hi))
    throw std::invalid_argument("experiment: eval interval must have lo < hi");
  if (spec.n_points < 1)
    throw std::invalid_argument("experiment: n_points must be >= 1");
  if (spec.replications < 1)
    throw std::invalid_argument("experiment: replications must be >= 1");
}

struct RepState {
  ReplicationResult result;
  double c0 = 0.0;
  std::vector<double> fixed_curves;  // flattened [h][point], oracle_gap only
};

}  // namespace

std::vector<double> eval_grid(double lo, double hi, int n) {
  if (!(lo < hi) || n < 1)
    throw std::invalid_argument("eval grid: need lo < hi and n >= 1");
  const double step = (hi - lo) / static_cast<double>(n);
  std::vector<double> pts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    pts[static_cast<std::size_t>(i)] =
        lo + (static_cast<double>(i) + 0.5) * step;
  return pts;
}

namespace {

// Shared driver for run_experiment and oracle_gap: one replication = draw
// data, run the selection rule, optionally keep every fixed-h curve.
RepState run_replication(const ExperimentSpec& spec,
                         const AdaptiveConfig& config,
                         const std::vector<double>& points, int rep,
                         bool keep_fixed_curves) {
  RepState st;
  st.result.index = rep;
  try {
    RngStream rng = RngStream::for_replication(spec.master_seed, rep);
    const IncrementSeries data = sample_increments(spec.model, spec.scheme, rng);
    const auto traces =
        adaptive_curve(data, spec.kernel, config, points, spec.model);
    const std::size_t np = points.size();
    st.result.g_hat.resize(np);
    st.result.h_hat.resize(np);
    double sse = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
      st.result.g_hat[p] = traces[p].estimate;
      st.result.h_hat[p] = traces[p].h_hat;
      const double err = traces[p].estimate - spec.model.true_g(points[p]);
      sse += err * err;
    }
    st.result.mise =
        (spec.eval_hi - spec.eval_lo) / static_cast<double>(spec.n_points) * sse;
    st.c0 = traces.front().c0;
    if (keep_fixed_curves) {
      const auto& hs = config.grid.values();
      st.fixed_curves.resize(hs.size() * np);
      CurveOptions opts;
      opts.path = config.path;
      opts.min_bins = config.min_bins;
      CurveEngine engine(data, points, hs.front(), opts);
      for (std::size_t j = 0; j < hs.size(); ++j) {
        const auto curve = engine.curve([&kernel = spec.kernel,
                                         h = hs[j]](double t) {
          return eval_scaled(kernel, h, t);
        });
        std::copy(curve.begin(), curve.end(),
                  st.fixed_curves.begin() + static_cast<std::ptrdiff_t>(j * np));
      }
    }
    st.result.ok = true;
  } catch (const std::exception& e) {
    st.result.ok = false;
    st.result.error = e.what();
    st.result.mise = 0.0;
    st.result.g_hat.clear();
    st.result.h_hat.clear();
    st.fixed_curves.clear();
  }
  return st;
}

RiskReport aggregate(const ExperimentSpec& spec, const AdaptiveConfig& config,
                     const std::vector<double>& points,
                     std::vector<RepState>&& states) {
  RiskReport rep;
  rep.model_name = spec.model.name();
  rep.kernel_record = spec.kernel.record();
  rep.scheme_kind = scheme_kind(spec.scheme);
  rep.n_delta_bar = scheme_n_delta_bar(spec.scheme);
  rep.n = scheme_size(spec.scheme);
  rep.c = config.c;
  rep.c0_mode = to_string(config.c0_mode);
  rep.grid_rule = config.grid.rule();
  rep.grid = config.grid.values();
  rep.eval_lo = spec.eval_lo;
  rep.eval_hi = spec.eval_hi;
  rep.n_points = spec.n_points;
  rep.master_seed = spec.master_seed;
  rep.levy_reported = !(spec.eval_lo <= 0.0 && spec.eval_hi >= 0.0);
  rep.points = points;

  const std::size_t np = points.size();
  rep.point_mse.assign(np, 0.0);
  rep.mean_h.assign(np, 0.0);
  double sum = 0.0, n_ok = 0.0;
  for (auto& st : states) {
    if (st.result.ok) {
      sum += st.result.mise;
      n_ok += 1.0;
      for (std::size_t p = 0; p < np; ++p) {
        const double err = st.result.g_hat[p] - spec.model.true_g(points[p]);
        rep.point_mse[p] += err * err;
        rep.mean_h[p] += st.result.h_hat[p];
      }
    } else {
      ++rep.n_failed;
    }
    rep.replications.push_back(std::move(st.result));
  }
  if (n_ok > 0.0) {
    rep.mean_mise = sum / n_ok;
    double ss = 0.0;
    for (const auto& r : rep.replications)
      if (r.ok) ss += (r.mise - rep.mean_mise) * (r.mise - rep.mean_mise);
    rep.se_mise = n_ok > 1.0 ? std::sqrt(ss / (n_ok - 1.0)) / std::sqrt(n_ok)
                             : 0.0;
    for (std::size_t p = 0; p < np; ++p) {
      rep.point_mse[p] /= n_ok;
      rep.mean_h[p] /= n_ok;
    }
  } else {
    rep.mean_mise = std::numeric_limits<double>::quiet_NaN();
    rep.se_mise = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

}  // namespace

RiskReport run_experiment(const ExperimentSpec& spec) {
  validate_spec(spec);
  const std::vector<double> points =
      eval_grid(spec.eval_lo, spec.eval_hi, spec.n_points);
  AdaptiveConfig config = spec.config;
  config.grid = resolve_grid(spec, scheme_n_delta_bar(spec.scheme));

  std::vector<RepState> states(static_cast<std::size_t>(spec.replications));
  parallel_for(spec.replications, spec.threads, [&](int r) {
    states[static_cast<std::size_t>(r)] =
        run_replication(spec, config, points, r, false);
  });
  return aggregate(spec, config, points, std::move(states));
}

nlohmann::ordered_json report_to_json(const RiskReport& r) {
  nlohmann::ordered_json j;
  j["model"] = r.model_name;
  j["kernel"] = r.kernel_record;
  j["scheme"] = r.scheme_kind;
  j["n"] = r.n;
  j["n_delta_bar"] = r.n_delta_bar;
  j["c"] = r.c;
  j["c0_mode"] = r.c0_mode;
  j["grid_rule"] = r.grid_rule;
  j["grid"] = r.grid;
  j["eval_lo"] = r.eval_lo;
  j["eval_hi"] = r.eval_hi;
  j["n_points"] = r.n_points;
  j["master_seed"] = r.master_seed;
  j["levy_reported"] = r.levy_reported;
  j["n_failed"] = r.n_failed;
  j["mean_mise"] = r.mean_mise;
  j["se_mise"] = r.se_mise;
  j["points"] = r.points;
  j["point_mse"] = r.point_mse;
  j["mean_h"] = r.mean_h;
  auto& reps = j["replications"] = nlohmann::ordered_json::array();
  for (const auto& rep : r.replications) {
    nlohmann::ordered_json jr;
    jr["index"] = rep.index;
    jr["ok"] = rep.ok;
    if (!rep.ok) jr["error"] = rep.error;
    jr["mise"] = rep.mise;
    jr["g_hat"] = rep.g_hat;
    jr["h_hat"] = rep.h_hat;
    reps.push_back(std::move(jr));
  }
  return j;
}

std::string report_csv_summary_header() {
  return "model,n_delta_bar,mean_mise,se_mise";
}

std::string report_csv_summary_row(const RiskReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.model_name << ',' << r.n_delta_bar << ',' << r.mean_mise << ','
     << r.se_mise;
  return os.str();
}

RateFit rate_regression(const ExperimentSpec& base,
                        const std::vector<SamplingScheme>& schemes) {
  if (schemes.size() < 3)
    throw std::invalid_argument(
        "rate regression: need at least 3 sampling schemes");
  std::set<double> distinct;
  for (const auto& s : schemes) {
    validate_scheme(s);
    if (!distinct.insert(scheme_n_delta_bar(s)).second)
      throw std::invalid_argument(
          "rate regression: duplicate n*delta_bar values");
  }

  RateFit fit;
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    ExperimentSpec spec = base;
    spec.scheme = schemes[i];
    spec.master_seed = base.master_seed + i;
    RiskReport rep = run_experiment(spec);
    if (!(rep.mean_mise > 0.0))
      throw std::runtime_error(
          "rate regression: experiment produced no usable MISE");
    fit.log_n_delta_bar.push_back(std::log(rep.n_delta_bar));
    fit.log_mean_mise.push_back(std::log(rep.mean_mise));
    fit.reports.push_back(std::move(rep));
  }

  const auto n = static_cast<double>(schemes.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    const double x = fit.log_n_delta_bar[i], y = fit.log_mean_mise[i];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

std::vector<OracleGapRow> oracle_gap(const ExperimentSpec& spec,
                                     const std::vector<double>& points) {
  validate_spec(spec);
  if (points.empty()) return {};
  AdaptiveConfig config = spec.config;
  config.grid = resolve_grid(spec, scheme_n_delta_bar(spec.scheme));
  const auto& hs = config.grid.values();
  const std::size_t np = points.size();

  std::vector<RepState> states(static_cast<std::size_t>(spec.replications));
  parallel_for(spec.replications, spec.threads, [&](int r) {
    states[static_cast<std::size_t>(r)] =
        run_replication(spec, config, points, r, true);
  });

  double n_ok = 0.0, c0_sum = 0.0;
  std::vector<double> adaptive_sse(np, 0.0);
  std::vector<std::vector<double>> fixed_sse(hs.size(),
                                             std::vector<double>(np, 0.0));
  for (const auto& st : states) {
    if (!st.result.ok) continue;
    n_ok += 1.0;
    c0_sum += st.c0;
    for (std::size_t p = 0; p < np; ++p) {
      const double truth = spec.model.true_g(points[p]);
      const double ea = st.result.g_hat[p] - truth;
      adaptive_sse[p] += ea * ea;
      for (std::size_t j = 0; j < hs.size(); ++j) {
        const double ef = st.fixed_curves[j * np + p] - truth;
        fixed_sse[j][p] += ef * ef;
      }
    }
  }
  if (n_ok == 0.0)
    throw std::runtime_error("oracle gap: every replication failed");
  const double c0 = c0_sum / n_ok;
  const std::int64_t n = scheme_size(spec.scheme);
  const double delta_bar =
      scheme_n_delta_bar(spec.scheme) / static_cast<double>(n);

  std::vector<OracleGapRow> rows(np);
  for (std::size_t p = 0; p < np; ++p) {
    OracleGapRow& row = rows[p];
    row.x0 = points[p];
    row.adaptive_risk = adaptive_sse[p] / n_ok;
    row.fixed_risks.resize(hs.size());
    std::size_t best = 0;
    for (std::size_t j = 0; j < hs.size(); ++j) {
      row.fixed_risks[j] = fixed_sse[j][p] / n_ok;
      if (row.fixed_risks[j] < row.fixed_risks[best]) best = j;
    }
    row.best_fixed_risk = row.fixed_risks[best];
    row.best_h = hs[best];
    row.v_best = variance_term(c0, n, delta_bar, hs[best]);
    row.ratio = row.adaptive_risk / (row.best_fixed_risk + row.v_best);
  }
  return rows;
}

IrregularReport irregular_experiment(const ExperimentSpec& spec) {
  IrregularReport out;
  out.report = run_experiment(spec);

  const auto intervals = scheme_intervals(spec.scheme);
  const auto n = static_cast<double>(intervals.size());
  double s1 = 0.0, s2 = 0.0;
  for (double d : intervals) {
    s1 += d;
    s2 += d * d;
  }
  auto& d = out.diagnostics;
  d.delta_bar = s1 / n;
  d.delta_sq_bar = s2 / n;
  d.condition_value = d.delta_sq_bar * d.delta_sq_bar / d.delta_bar;
  d.threshold = 1.0 / n;
  d.condition_ok = d.condition_value <= d.threshold;
  return out;
}

}  // namespace levyest
