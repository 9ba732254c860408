#pragma once

#include <filesystem>
#include <string>

#include "topicforge/eval/experiment.hpp"

namespace topicforge::eval {

/// Column title for a cell, e.g. "CNN-LSTM(Vader&TOPIC)".
std::string column_title(nn::Arch model, nn::Variant variant, const std::string& engine);

/// Long format: model,variant,engine,split,rmse,mae,r2,mape.
std::string report_csv(const ExperimentReport& report);

/// One table: TITLE then the variants of each model side by side; a
/// "Train Set" block and a "Test Set" block of RMSE / MAE / R2 Score / MAPE.
/// The best value per model and metric row is bold.
std::string report_markdown(const ExperimentReport& report);

/// Per-seed metrics, one line per (cell, seed, split).
std::string seeds_csv(const ExperimentReport& report);

std::string predictions_csv(const Cell& cell);

/// report.md, report.csv, seeds.csv, predictions/<cell>.csv and
/// plots/<cell>_{train,test,loss}.svg under `dir`.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir, bool markdown = true,
                  bool csv_table = true);

/// Raw experiment results: experiment.json (engine, seeds, snapshot, cells),
/// runs.csv (per-seed metrics) and predictions/<cell>{,_loss}.csv.
void save_experiment(const ExperimentReport& report, const std::filesystem::path& dir);
/// Inverse of save_experiment; medians and rows are recomputed.
ExperimentReport load_experiment(const std::filesystem::path& dir);

}  // namespace topicforge::eval
