#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "provq/trainer.hpp"

namespace provq {

// Snapshot <-> JSON. Loading rejects unknown format versions, naming the
// expected and found values.
std::string snapshot_to_json(const Snapshot& snapshot);
Snapshot snapshot_from_json(const std::string& text, const std::string& origin);
void save_snapshot(const Snapshot& snapshot, const std::filesystem::path& path);
Snapshot load_snapshot(const std::filesystem::path& path);

// Checkpoint <-> JSON; carries the config echo so a file is self-describing.
std::string train_state_to_json(const TrainState& state,
                                const std::string& config_echo);
TrainState train_state_from_json(const std::string& text,
                                 const std::string& origin,
                                 std::string* config_echo = nullptr);
void save_train_state(const TrainState& state, const std::string& config_echo,
                      const std::filesystem::path& path);
TrainState load_train_state(const std::filesystem::path& path,
                            std::string* config_echo = nullptr);

// Metric series CSV.
extern const char* const kMetricsCsvHeader;
std::string metrics_csv_row(const MetricsRecord& record);
void write_metrics_csv(const std::vector<MetricsRecord>& series,
                       const std::filesystem::path& path);
std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path);

}  // namespace provq
