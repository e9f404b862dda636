#include "provq/serialize.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "provq/csv.hpp"
#include "provq/errors.hpp"

namespace provq {

namespace {

using nlohmann::json;

json rows_to_json(const std::vector<double>& flat, std::size_t dim) {
  json rows = json::array();
  for (std::size_t i = 0; i < flat.size(); i += dim) {
    json row = json::array();
    for (std::size_t j = 0; j < dim; ++j) row.push_back(flat[i + j]);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> rows_from_json(const json& rows, std::size_t dim,
                                   const std::string& field,
                                   const std::string& origin) {
  std::vector<double> flat;
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != dim) {
      throw IoError(origin + ": field '" + field + "' expects rows of " +
                    std::to_string(dim) + " numbers");
    }
    for (const auto& v : row) flat.push_back(v.get<double>());
  }
  return flat;
}

json losses_to_json(const LossBreakdown& l) {
  return json{{"recon", l.recon},
              {"vq", l.vq},
              {"commit", l.commit},
              {"total", l.total}};
}

LossBreakdown losses_from_json(const json& j) {
  LossBreakdown l;
  l.recon = j.at("recon").get<double>();
  l.vq = j.at("vq").get<double>();
  l.commit = j.at("commit").get<double>();
  l.total = j.at("total").get<double>();
  return l;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw IoError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
  return j;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

std::string snapshot_to_json(const Snapshot& snapshot) {
  json j;
  j["format_version"] = snapshot.format_version;
  j["kind"] = "provq_snapshot";
  j["step"] = snapshot.step;
  j["stage"] = to_string(snapshot.stage);
  j["alpha"] = snapshot.alpha;
  j["omega"] = snapshot.omega;
  j["losses"] = losses_to_json(snapshot.losses);
  j["metrics"] = {{"mse", snapshot.metrics.mse},
                  {"mse_disk", snapshot.metrics.mse_disk},
                  {"mse_tri", snapshot.metrics.mse_tri},
                  {"mse_hard", snapshot.metrics.mse_hard},
                  {"mse_hard_disk", snapshot.metrics.mse_hard_disk},
                  {"mse_hard_tri", snapshot.metrics.mse_hard_tri},
                  {"perplexity", snapshot.metrics.perplexity},
                  {"norm_perplexity", snapshot.metrics.norm_perplexity},
                  {"utilization", snapshot.metrics.utilization},
                  {"pairwise_dist", snapshot.metrics.pairwise_dist}};
  j["d_lat"] = snapshot.d_lat;

  json modes = json::array();
  for (Mode m : snapshot.dataset_modes) modes.push_back(to_string(m));
  j["dataset"] = {{"points", rows_to_json(snapshot.dataset_points, 2)},
                  {"modes", std::move(modes)}};
  j["embeddings"] = rows_to_json(snapshot.embeddings, snapshot.d_lat);
  j["codebook"] = rows_to_json(snapshot.codebook, snapshot.d_lat);
  j["assignments"] = snapshot.assignments;
  return j.dump(1);
}

Snapshot snapshot_from_json(const std::string& text,
                            const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(origin + " is not valid JSON: " + e.what());
  }

  Snapshot s;
  try {
    s.format_version = j.at("format_version").get<int>();
    if (s.format_version != kSnapshotFormatVersion) {
      throw ConfigError("snapshot '" + origin + "': format_version " +
                        std::to_string(s.format_version) + ", expected " +
                        std::to_string(kSnapshotFormatVersion));
    }
    s.step = j.at("step").get<long>();
    s.stage = stage_from_string(j.at("stage").get<std::string>());
    s.alpha = j.at("alpha").get<double>();
    s.omega = j.at("omega").get<double>();
    s.losses = losses_from_json(j.at("losses"));
    const json& m = j.at("metrics");
    s.metrics.step = s.step;
    s.metrics.stage = s.stage;
    s.metrics.alpha = s.alpha;
    s.metrics.omega = s.omega;
    s.metrics.losses = s.losses;
    s.metrics.mse = m.at("mse").get<double>();
    s.metrics.mse_disk = m.at("mse_disk").get<double>();
    s.metrics.mse_tri = m.at("mse_tri").get<double>();
    s.metrics.mse_hard = m.at("mse_hard").get<double>();
    s.metrics.mse_hard_disk = m.at("mse_hard_disk").get<double>();
    s.metrics.mse_hard_tri = m.at("mse_hard_tri").get<double>();
    s.metrics.perplexity = m.at("perplexity").get<double>();
    s.metrics.norm_perplexity = m.at("norm_perplexity").get<double>();
    s.metrics.utilization = m.at("utilization").get<double>();
    s.metrics.pairwise_dist = m.at("pairwise_dist").get<double>();
    s.d_lat = j.at("d_lat").get<std::size_t>();
    if (s.d_lat == 0) throw IoError(origin + ": d_lat must be positive");

    const json& ds = j.at("dataset");
    s.dataset_points = rows_from_json(ds.at("points"), 2, "dataset.points",
                                      origin);
    for (const auto& mode : ds.at("modes")) {
      s.dataset_modes.push_back(mode_from_string(mode.get<std::string>()));
    }
    s.embeddings = rows_from_json(j.at("embeddings"), s.d_lat, "embeddings",
                                  origin);
    s.codebook = rows_from_json(j.at("codebook"), s.d_lat, "codebook", origin);
    s.assignments = j.at("assignments").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw IoError(origin + ": bad snapshot JSON: " + e.what());
  }

  if (s.dataset_modes.size() * 2 != s.dataset_points.size() ||
      s.assignments.size() != s.dataset_modes.size() ||
      s.embeddings.size() != s.dataset_modes.size() * s.d_lat) {
    throw IoError(origin + ": snapshot arrays have inconsistent lengths");
  }
  return s;
}

void save_snapshot(const Snapshot& snapshot,
                   const std::filesystem::path& path) {
  write_text_file(path, snapshot_to_json(snapshot));
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return snapshot_from_json(buf.str(), path.string());
}

std::string train_state_to_json(const TrainState& state,
                                const std::string& config_echo) {
  json j;
  j["format_version"] = state.format_version;
  j["kind"] = "provq_checkpoint";
  j["step"] = state.step;
  j["encoder"] = {{"widths", state.encoder_widths},
                  {"weights", state.encoder_weights},
                  {"biases", state.encoder_biases}};
  j["decoder"] = {{"widths", state.decoder_widths},
                  {"weights", state.decoder_weights},
                  {"biases", state.decoder_biases}};
  j["codebook"] = {{"k", state.codebook_k},
                   {"d_lat", state.d_lat},
                   {"values", state.codebook}};
  j["adam"] = {{"step_count", state.adam_steps},
               {"m", state.adam_m},
               {"v", state.adam_v}};
  j["rng_train"] = state.rng_train;
  j["batch_order"] = state.batch_order;
  j["batch_cursor"] = state.batch_cursor;
  j["config"] = config_echo;
  return j.dump(1);
}

TrainState train_state_from_json(const std::string& text,
                                 const std::string& origin,
                                 std::string* config_echo) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(origin + " is not valid JSON: " + e.what());
  }

  TrainState s;
  try {
    s.format_version = j.at("format_version").get<int>();
    if (s.format_version != kCheckpointFormatVersion) {
      throw ConfigError("checkpoint '" + origin + "': format_version " +
                        std::to_string(s.format_version) + ", expected " +
                        std::to_string(kCheckpointFormatVersion));
    }
    s.step = j.at("step").get<long>();
    const json& enc = j.at("encoder");
    s.encoder_widths = enc.at("widths").get<std::vector<std::size_t>>();
    s.encoder_weights =
        enc.at("weights").get<std::vector<std::vector<double>>>();
    s.encoder_biases =
        enc.at("biases").get<std::vector<std::vector<double>>>();
    const json& dec = j.at("decoder");
    s.decoder_widths = dec.at("widths").get<std::vector<std::size_t>>();
    s.decoder_weights =
        dec.at("weights").get<std::vector<std::vector<double>>>();
    s.decoder_biases =
        dec.at("biases").get<std::vector<std::vector<double>>>();
    const json& cb = j.at("codebook");
    s.codebook_k = cb.at("k").get<std::size_t>();
    s.d_lat = cb.at("d_lat").get<std::size_t>();
    s.codebook = cb.at("values").get<std::vector<double>>();
    const json& adam = j.at("adam");
    s.adam_steps = adam.at("step_count").get<long>();
    s.adam_m = adam.at("m").get<std::vector<std::vector<double>>>();
    s.adam_v = adam.at("v").get<std::vector<std::vector<double>>>();
    s.rng_train = j.at("rng_train").get<std::string>();
    s.batch_order = j.at("batch_order").get<std::vector<std::size_t>>();
    s.batch_cursor = j.at("batch_cursor").get<std::size_t>();
    if (config_echo) *config_echo = j.at("config").get<std::string>();
  } catch (const json::exception& e) {
    throw IoError(origin + ": bad checkpoint JSON: " + e.what());
  }
  return s;
}

void save_train_state(const TrainState& state, const std::string& config_echo,
                      const std::filesystem::path& path) {
  write_text_file(path, train_state_to_json(state, config_echo));
}

TrainState load_train_state(const std::filesystem::path& path,
                            std::string* config_echo) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return train_state_from_json(buf.str(), path.string(), config_echo);
}

const char* const kMetricsCsvHeader =
    "step,stage,alpha,omega,recon,vq,commit,mse,mse_disk,mse_tri,mse_hard,"
    "perplexity,norm_perplexity,utilization,pairdist";

std::string metrics_csv_row(const MetricsRecord& r) {
  std::ostringstream out;
  out << r.step << ',' << to_string(r.stage) << ',' << format_double(r.alpha)
      << ',' << format_double(r.omega) << ',' << format_double(r.losses.recon)
      << ',' << format_double(r.losses.vq) << ','
      << format_double(r.losses.commit) << ',' << format_double(r.mse) << ','
      << format_double(r.mse_disk) << ',' << format_double(r.mse_tri) << ','
      << format_double(r.mse_hard) << ',' << format_double(r.perplexity)
      << ',' << format_double(r.norm_perplexity) << ','
      << format_double(r.utilization) << ',' << format_double(r.pairwise_dist);
  return out.str();
}

void write_metrics_csv(const std::vector<MetricsRecord>& series,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << kMetricsCsvHeader << '\n';
  for (const MetricsRecord& r : series) out << metrics_csv_row(r) << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kMetricsCsvHeader) {
    throw IoError("'" + path.string() + "' missing the metrics CSV header");
  }
  std::vector<MetricsRecord> series;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 15) {
      throw IoError("'" + path.string() + "' line " + std::to_string(lineno) +
                    " has " + std::to_string(cells.size()) +
                    " fields, expected 15");
    }
    MetricsRecord r;
    const std::string& origin = path.string();
    r.step = parse_long(cells[0], origin, lineno);
    r.stage = stage_from_string(cells[1]);
    r.alpha = parse_double(cells[2], origin, lineno);
    r.omega = parse_double(cells[3], origin, lineno);
    r.losses.recon = parse_double(cells[4], origin, lineno);
    r.losses.vq = parse_double(cells[5], origin, lineno);
    r.losses.commit = parse_double(cells[6], origin, lineno);
    r.mse = parse_double(cells[7], origin, lineno);
    r.mse_disk = parse_double(cells[8], origin, lineno);
    r.mse_tri = parse_double(cells[9], origin, lineno);
    r.mse_hard = parse_double(cells[10], origin, lineno);
    r.perplexity = parse_double(cells[11], origin, lineno);
    r.norm_perplexity = parse_double(cells[12], origin, lineno);
    r.utilization = parse_double(cells[13], origin, lineno);
    r.pairwise_dist = parse_double(cells[14], origin, lineno);
    series.push_back(r);  // losses.total is not a CSV column
  }
  return series;
}

}  // namespace provq
