#include "provq/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "provq/csv.hpp"
#include "provq/errors.hpp"

namespace provq {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& value, const std::string& key) {
  double v = 0.0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw ConfigError("config: key '" + key + "' has bad number '" + value +
                      "'");
  }
  return v;
}

long to_long(const std::string& value, const std::string& key) {
  long v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw ConfigError("config: key '" + key + "' has bad integer '" + value +
                      "'");
  }
  return v;
}

std::uint64_t to_u64(const std::string& value, const std::string& key) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw ConfigError("config: key '" + key + "' has bad integer '" + value +
                      "'");
  }
  return v;
}

std::size_t to_size(const std::string& value, const std::string& key) {
  const long v = to_long(value, key);
  if (v < 0) throw ConfigError("config: key '" + key + "' must be >= 0");
  return static_cast<std::size_t>(v);
}

std::vector<double> to_doubles(const std::string& value, const std::string& key,
                               std::size_t expected) {
  const auto parts = split(value, ',');
  if (expected != 0 && parts.size() != expected) {
    throw ConfigError("config: key '" + key + "' expects " +
                      std::to_string(expected) + " comma-separated values");
  }
  std::vector<double> out;
  out.reserve(parts.size());
  for (const auto& p : parts) out.push_back(to_double(p, key));
  return out;
}

}  // namespace

const char* to_string(Variant variant) {
  switch (variant) {
    case Variant::kVanillaVq:
      return "vanilla_vq";
    case Variant::kSoftOnly:
      return "soft_only";
    case Variant::kWarmupOnly:
      return "warmup_only";
    default:
      return "provq";
  }
}

Variant variant_from_string(const std::string& text) {
  if (text == "vanilla_vq") return Variant::kVanillaVq;
  if (text == "soft_only") return Variant::kSoftOnly;
  if (text == "warmup_only") return Variant::kWarmupOnly;
  if (text == "provq") return Variant::kProvq;
  throw ConfigError("config: unknown variant '" + text +
                    "' (expected vanilla_vq, soft_only, warmup_only, provq)");
}

void ExperimentConfig::validate() const {
  dataset.validate();
  if (model.d_lat < 1) throw ConfigError("config: d_lat must be >= 1");
  if (quantizer.codebook_size < 2) {
    throw ConfigError("config: codebook_size must be >= 2");
  }
  if (!(quantizer.init_std > 0.0)) {
    throw ConfigError("config: quantizer init_std must be > 0");
  }
  schedule.validate();
  if (total_steps < 0) throw ConfigError("config: total_steps must be >= 0");
  if (batch_size < 1) throw ConfigError("config: batch_size must be >= 1");
  if (eval_every < 1) throw ConfigError("config: eval_every must be >= 1");
  for (long s : snapshot_steps) {
    if (s < 0) throw ConfigError("config: snapshot steps must be >= 0");
  }
  if (!(optimizer.lr > 0.0)) throw ConfigError("config: lr must be > 0");
}

ExperimentConfig ExperimentConfig::normalized() const {
  ExperimentConfig out = *this;
  switch (variant) {
    case Variant::kVanillaVq:
      out.schedule.t_warm = 0;
      out.schedule.t_trans = 0;
      out.schedule.scheduler = SchedulerKind::kHard;
      break;
    case Variant::kSoftOnly:
      out.schedule.t_warm = 0;
      break;
    case Variant::kWarmupOnly:
      out.schedule.scheduler = SchedulerKind::kHard;
      break;
    case Variant::kProvq:
      break;
  }
  return out;
}

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config: " + origin + " line " +
                          std::to_string(lineno) + ": unterminated section");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "dataset" && section != "model" &&
          section != "quantizer" && section != "schedule" &&
          section != "optimizer") {
        throw ConfigError("config: unknown section [" + section + "] in " +
                          origin);
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: " + origin + " line " +
                        std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string where =
        section.empty() ? "top level" : "section [" + section + "]";

    if (section.empty()) {
      if (key == "variant") {
        cfg.variant = variant_from_string(value);
      } else if (key == "seed") {
        cfg.seed = to_u64(value, key);
      } else if (key == "total_steps") {
        cfg.total_steps = to_long(value, key);
      } else if (key == "batch_size") {
        cfg.batch_size = to_size(value, key);
      } else if (key == "eval_every") {
        cfg.eval_every = to_long(value, key);
      } else if (key == "snapshot_steps") {
        cfg.snapshot_steps.clear();
        if (!value.empty()) {
          for (const auto& part : split(value, ',')) {
            cfg.snapshot_steps.push_back(to_long(part, key));
          }
        }
      } else {
        throw ConfigError("config: unknown key '" + key + "' at " + where +
                          " in " + origin);
      }
    } else if (section == "dataset") {
      if (key == "n_disk") {
        cfg.dataset.n_disk = to_size(value, key);
      } else if (key == "n_triangle") {
        cfg.dataset.n_triangle = to_size(value, key);
      } else if (key == "disk_center") {
        const auto v = to_doubles(value, key, 2);
        cfg.dataset.disk_center = {v[0], v[1]};
      } else if (key == "disk_radius") {
        cfg.dataset.disk_radius = to_double(value, key);
      } else if (key == "triangle_vertices") {
        const auto v = to_doubles(value, key, 6);
        cfg.dataset.triangle = {{{v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}}};
      } else if (key == "seed") {
        cfg.dataset.seed = to_u64(value, key);
      } else if (key == "csv") {
        cfg.dataset.csv_path = value;
      } else {
        throw ConfigError("config: unknown key '" + key + "' in " + where +
                          " in " + origin);
      }
    } else if (section == "model") {
      if (key == "hidden") {
        cfg.model.hidden.clear();
        if (!value.empty()) {
          for (const auto& part : split(value, ',')) {
            cfg.model.hidden.push_back(to_size(part, key));
          }
        }
      } else if (key == "d_lat") {
        cfg.model.d_lat = to_size(value, key);
      } else {
        throw ConfigError("config: unknown key '" + key + "' in " + where +
                          " in " + origin);
      }
    } else if (section == "quantizer") {
      if (key == "codebook_size") {
        cfg.quantizer.codebook_size = to_size(value, key);
      } else if (key == "beta") {
        cfg.schedule.beta = to_double(value, key);
      } else if (key == "init_std") {
        cfg.quantizer.init_std = to_double(value, key);
      } else {
        throw ConfigError("config: unknown key '" + key + "' in " + where +
                          " in " + origin);
      }
    } else if (section == "schedule") {
      if (key == "t_warm") {
        cfg.schedule.t_warm = to_long(value, key);
      } else if (key == "t_trans") {
        cfg.schedule.t_trans = to_long(value, key);
      } else if (key == "lambda") {
        cfg.schedule.lambda = to_double(value, key);
      } else if (key == "scheduler") {
        cfg.schedule.scheduler = scheduler_from_string(value);
      } else {
        throw ConfigError("config: unknown key '" + key + "' in " + where +
                          " in " + origin);
      }
    } else {  // optimizer
      if (key == "lr") {
        cfg.optimizer.lr = to_double(value, key);
      } else if (key == "betas") {
        const auto v = to_doubles(value, key, 2);
        cfg.optimizer.beta1 = v[0];
        cfg.optimizer.beta2 = v[1];
      } else if (key == "eps") {
        cfg.optimizer.eps = to_double(value, key);
      } else {
        throw ConfigError("config: unknown key '" + key + "' in " + where +
                          " in " + origin);
      }
    }
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot read '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

std::string write_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "variant = " << to_string(config.variant) << '\n'
      << "seed = " << config.seed << '\n'
      << "total_steps = " << config.total_steps << '\n'
      << "batch_size = " << config.batch_size << '\n'
      << "eval_every = " << config.eval_every << '\n';
  out << "snapshot_steps = ";
  for (std::size_t i = 0; i < config.snapshot_steps.size(); ++i) {
    if (i > 0) out << ',';
    out << config.snapshot_steps[i];
  }
  out << '\n';

  out << "\n[dataset]\n"
      << "n_disk = " << config.dataset.n_disk << '\n'
      << "n_triangle = " << config.dataset.n_triangle << '\n'
      << "disk_center = " << format_double(config.dataset.disk_center.x) << ','
      << format_double(config.dataset.disk_center.y) << '\n'
      << "disk_radius = " << format_double(config.dataset.disk_radius) << '\n'
      << "triangle_vertices = ";
  for (int i = 0; i < 3; ++i) {
    if (i > 0) out << ',';
    out << format_double(config.dataset.triangle[i].x) << ','
        << format_double(config.dataset.triangle[i].y);
  }
  out << '\n' << "seed = " << config.dataset.seed << '\n';
  if (!config.dataset.csv_path.empty()) {
    out << "csv = " << config.dataset.csv_path << '\n';
  }

  out << "\n[model]\n"
      << "hidden = ";
  for (std::size_t i = 0; i < config.model.hidden.size(); ++i) {
    if (i > 0) out << ',';
    out << config.model.hidden[i];
  }
  out << '\n' << "d_lat = " << config.model.d_lat << '\n';

  out << "\n[quantizer]\n"
      << "codebook_size = " << config.quantizer.codebook_size << '\n'
      << "beta = " << format_double(config.schedule.beta) << '\n'
      << "init_std = " << format_double(config.quantizer.init_std) << '\n';

  out << "\n[schedule]\n"
      << "t_warm = " << config.schedule.t_warm << '\n'
      << "t_trans = " << config.schedule.t_trans << '\n'
      << "lambda = " << format_double(config.schedule.lambda) << '\n'
      << "scheduler = " << to_string(config.schedule.scheduler) << '\n';

  out << "\n[optimizer]\n"
      << "lr = " << format_double(config.optimizer.lr) << '\n'
      << "betas = " << format_double(config.optimizer.beta1) << ','
      << format_double(config.optimizer.beta2) << '\n'
      << "eps = " << format_double(config.optimizer.eps) << '\n';

  return out.str();
}

}  // namespace provq
