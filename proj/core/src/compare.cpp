#include "provq/compare.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <sstream>
#include <thread>

#include "provq/csv.hpp"
#include "provq/errors.hpp"
#include "provq/serialize.hpp"

namespace provq {

namespace {

struct Job {
  Variant variant;
  std::uint64_t seed;
  std::size_t variant_index;
  bool failed = false;
  std::string error;
  MetricsRecord final_metrics;
};

std::size_t env_thread_cap() {
  const char* raw = std::getenv("PROVQ_THREADS");
  if (!raw) return 0;
  std::size_t cap = 0;
  const auto res = std::from_chars(raw, raw + std::string_view(raw).size(), cap);
  if (res.ec != std::errc() || cap == 0) return 0;
  return cap;
}

void run_job(const ExperimentConfig& base, const CompareOptions& options,
             Job& job) {
  try {
    ExperimentConfig cfg = base;
    cfg.variant = job.variant;
    cfg.seed = job.seed;

    std::filesystem::path job_dir;
    if (!options.out_dir.empty()) {
      job_dir = options.out_dir /
                (std::string(to_string(job.variant)) + "_seed" +
                 std::to_string(job.seed));
      std::filesystem::create_directories(job_dir);
    }

    RunResult result = run_experiment(cfg);
    job.final_metrics = result.final_snapshot.metrics;
    if (!job_dir.empty()) {
      write_metrics_csv(result.series, job_dir / "metrics.csv");
    }
  } catch (const std::exception& e) {
    job.failed = true;
    job.error = e.what();
  }
}

}  // namespace

double mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc / static_cast<double>(values.size());
}

double sample_std(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double acc = 0.0;
  for (double v : values) acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

bool CompareReport::any_failed() const {
  for (const VariantResult& v : variants) {
    if (v.failed) return true;
  }
  return false;
}

namespace {

double improvement(const CompareReport& report, std::size_t index,
                   std::vector<double> VariantResult::* field) {
  const double base = mean(report.variants[report.baseline].*field);
  const double value = mean(report.variants[index].*field);
  if (base == 0.0) return 0.0;
  return (base - value) / base * 100.0;
}

}  // namespace

double CompareReport::improvement_mse_pct(std::size_t index) const {
  return improvement(*this, index, &VariantResult::mse);
}

double CompareReport::improvement_disk_pct(std::size_t index) const {
  return improvement(*this, index, &VariantResult::mse_disk);
}

double CompareReport::improvement_tri_pct(std::size_t index) const {
  return improvement(*this, index, &VariantResult::mse_tri);
}

CompareReport run_compare(const ExperimentConfig& base,
                          const std::vector<Variant>& variants,
                          const std::vector<std::uint64_t>& seeds,
                          const CompareOptions& options) {
  if (variants.size() < 2) {
    throw ConfigError("compare: need at least 2 variants, got " +
                      std::to_string(variants.size()));
  }
  if (seeds.empty()) throw ConfigError("compare: need at least 1 seed");

  std::vector<Job> jobs;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    for (std::uint64_t seed : seeds) {
      jobs.push_back(Job{variants[v], seed, v});
    }
  }

  std::size_t workers = options.max_threads > 0
                            ? options.max_threads
                            : std::max<std::size_t>(
                                  1, std::thread::hardware_concurrency());
  if (const std::size_t cap = env_thread_cap(); cap > 0) {
    workers = std::min(workers, cap);
  }
  workers = std::min(workers, jobs.size());

  if (workers <= 1) {
    for (Job& job : jobs) run_job(base, options, job);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t i = next.fetch_add(1); i < jobs.size();
             i = next.fetch_add(1)) {
          run_job(base, options, jobs[i]);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  CompareReport report;
  report.variants.resize(variants.size());
  for (std::size_t v = 0; v < variants.size(); ++v) {
    report.variants[v].variant = variants[v];
    if (variants[v] == Variant::kVanillaVq) report.baseline = v;
  }
  for (const Job& job : jobs) {
    VariantResult& vr = report.variants[job.variant_index];
    if (job.failed) {
      vr.failed = true;
      vr.error = vr.error.empty() ? job.error : vr.error + "; " + job.error;
      continue;
    }
    vr.seeds.push_back(job.seed);
    vr.mse.push_back(job.final_metrics.mse_hard);
    vr.mse_disk.push_back(job.final_metrics.mse_hard_disk);
    vr.mse_tri.push_back(job.final_metrics.mse_hard_tri);
    vr.pairwise_dist.push_back(job.final_metrics.pairwise_dist);
    vr.utilization.push_back(job.final_metrics.utilization);
    vr.perplexity.push_back(job.final_metrics.perplexity);
  }
  return report;
}

std::string compare_table(const CompareReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(13) << "variant" << std::right << std::setw(6)
      << "seeds" << std::setw(22) << "tri_mse (mean+-std)" << std::setw(22)
      << "disk_mse (mean+-std)" << std::setw(11) << "pairdist" << std::setw(9)
      << "util" << std::setw(10) << "impr_tri" << std::setw(11) << "impr_disk"
      << '\n';
  for (std::size_t v = 0; v < report.variants.size(); ++v) {
    const VariantResult& vr = report.variants[v];
    out << std::left << std::setw(13) << to_string(vr.variant) << std::right;
    if (vr.failed) {
      out << "  FAILED: " << vr.error << '\n';
      continue;
    }
    std::ostringstream tri;
    tri << std::scientific << std::setprecision(3) << mean(vr.mse_tri)
        << "+-" << std::setprecision(1) << sample_std(vr.mse_tri);
    std::ostringstream disk;
    disk << std::scientific << std::setprecision(3) << mean(vr.mse_disk)
         << "+-" << std::setprecision(1) << sample_std(vr.mse_disk);
    out << std::setw(6) << vr.seeds.size() << std::setw(22) << tri.str()
        << std::setw(22) << disk.str() << std::setw(11) << std::fixed
        << std::setprecision(4) << mean(vr.pairwise_dist) << std::setw(9)
        << std::setprecision(3) << mean(vr.utilization) << std::setw(9)
        << std::setprecision(1) << report.improvement_tri_pct(v) << '%'
        << std::setw(10) << report.improvement_disk_pct(v) << '%' << '\n';
  }
  return out.str();
}

std::string compare_csv(const CompareReport& report) {
  std::ostringstream out;
  out << "variant,n_seeds,mse_tri_mean,mse_tri_std,mse_disk_mean,"
         "mse_disk_std,mse_mean,mse_std,pairdist_mean,utilization_mean,"
         "perplexity_mean,improve_tri_pct,improve_disk_pct,improve_pct,"
         "status\n";
  for (std::size_t v = 0; v < report.variants.size(); ++v) {
    const VariantResult& vr = report.variants[v];
    out << to_string(vr.variant) << ',' << vr.seeds.size() << ','
        << format_double(mean(vr.mse_tri)) << ','
        << format_double(sample_std(vr.mse_tri)) << ','
        << format_double(mean(vr.mse_disk)) << ','
        << format_double(sample_std(vr.mse_disk)) << ','
        << format_double(mean(vr.mse)) << ','
        << format_double(sample_std(vr.mse)) << ','
        << format_double(mean(vr.pairwise_dist)) << ','
        << format_double(mean(vr.utilization)) << ','
        << format_double(mean(vr.perplexity)) << ','
        << format_double(report.improvement_tri_pct(v)) << ','
        << format_double(report.improvement_disk_pct(v)) << ','
        << format_double(report.improvement_mse_pct(v)) << ','
        << (vr.failed ? "failed" : "ok") << '\n';
  }
  return out.str();
}

}  // namespace provq
