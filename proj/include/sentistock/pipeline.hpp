#pragma once

#include <string>
#include <vector>

#include "sentistock/config.hpp"

namespace sentistock {

// Runs the processing stages over a directory of plain CSV/JSONL artifacts so
// any stage can be re-run, diffed or replaced in isolation. Artifacts, per
// market m:
//   ingest     m_articles.jsonl (merged, validated), m_stock.csv (composite)
//   prep       m_selected.jsonl (length filter, dedup, keyword filter, daily cap)
//   features   m_terms.csv      (per-day top TF-IDF terms)
//   sentiment  m_series.csv     (aligned stock/sentiment change-rate table)
//   dataset    datasets/m_<task>_<window>_<direction>.csv
//   train      models/m_<task>_<window>_<direction>_<model>.model
//   report     report.csv, report.txt
//   synth      synthetic_series.csv, synthetic_plot.csv
class Pipeline {
public:
    explicit Pipeline(RunConfig cfg);

    void stage_ingest();
    void stage_prep();
    void stage_features();
    void stage_sentiment();
    void stage_dataset();
    void stage_train();
    void stage_report();
    void stage_synth();

    // Dispatches one stage by name; unknown names throw ConfigError.
    void run_stage(const std::string& name);

    // ingest through report, in order. Synth is standalone.
    void run_all();

    const RunConfig& config() const { return cfg_; }
    std::string artifact_path(const std::string& name) const;

private:
    RunConfig cfg_;
};

// {ingest, prep, features, sentiment, dataset, train, report, synth}.
const std::vector<std::string>& stage_names();
// The stages run_all executes, in order.
const std::vector<std::string>& run_stage_order();

}  // namespace sentistock
