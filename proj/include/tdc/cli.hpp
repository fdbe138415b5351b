#ifndef TDC_CLI_HPP
#define TDC_CLI_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tdc/metrics.hpp"
#include "tdc/model.hpp"
#include "tdc/optim.hpp"

namespace tdc::cli {

/// Everything a run needs: model hyperparameters, data locations, training
/// schedule, grid definition, and the output directory. Flag names in the
/// front end match these fields one to one.
struct RunConfig {
    // model
    std::string kind = "tdconv";  // tdconv|var|dybm|cnn|cnn_pool
    std::string task = "autoreg";  // autoreg|classify
    int feature_maps = 4;          // K
    double lambda = 0.85;
    double mu = 0.85;
    double pool1_l0 = 1.0;
    double pool1_growth = 1.0;
    double pool2_l0 = 1.0;
    double pool2_growth = 1.0;
    bool pool_infinite = false;  // pool1's last window absorbs longer histories
    std::string patch_lens = "1,2,4,full";
    double l1_coeff = 0.01;  // c
    int history = 100;       // H, lag window per sample
    int var_lag = 0;         // kind var: lag T (0 = history)
    double sentinel = kDefaultSentinel;

    // data
    std::string series_path;  // autoregression: series CSV
    std::string dataset_dir;  // classification: directory with train/ and test/
    std::string norm = "auto";  // minmax|standardize|none|auto (task default)
    double split_fraction = 0.67;

    // training
    int iterations = 1000;
    int batch_size = 16;  // M
    std::vector<std::uint64_t> seeds{1};
    int eval_stride = 1;
    bool shuffle = false;
    std::string metric = "auto";  // rmse|auc|auto

    // grid search
    bool paper_grid = false;
    std::string grid_feature_maps;  // comma lists; empty = current value only
    std::string grid_lambda;
    std::string grid_l0;
    std::string grid_growth;
    std::string grid_l1;
    bool uncoupled_mu = false;  // sweep mu separately from lambda
    std::string grid_mu;

    // output
    std::string out_dir = "out";
};

struct SeedResult {
    std::uint64_t seed = 0;
    double average = std::numeric_limits<double>::quiet_NaN();
    double best = std::numeric_limits<double>::quiet_NaN();
    int best_iteration = -1;
    std::string checkpoint_path;
};

struct MetricReport {
    std::string metric_name;
    double average = std::numeric_limits<double>::quiet_NaN();  // mean over seeds
    double best = std::numeric_limits<double>::quiet_NaN();     // best over seeds
    int best_iteration = -1;
    std::uint64_t best_seed = 0;
    std::vector<SeedResult> seeds;
};

/// Prepared samples plus the normalization fitted on the training part.
struct DataBundle {
    std::vector<LabeledSample> train;
    std::vector<LabeledSample> test;
    AttributeStats stats;
    bool has_stats = false;
    int attrs = 0;
    int input_len = 0;
    Task task = Task::autoreg;
};

DataBundle load_data(const RunConfig& cfg);
ModelConfig model_config_from(const RunConfig& cfg, const DataBundle& data);
MetricKind resolve_metric(const RunConfig& cfg);
std::vector<int> parse_patch_lens(const std::string& text);

/// Trains one model per seed; writes trainlog_seed<S>.csv, checkpoint files
/// and metrics.csv under out_dir.
MetricReport run_train(const RunConfig& cfg);

struct EvalConfig {
    std::string checkpoint_path;
    std::string series_path;
    std::string dataset_dir;
    double split_fraction = 0.67;
    std::string out_dir = "out";
};

/// Evaluates a checkpoint on the test part of the given data; writes
/// metrics.csv and predictions.csv.
double run_evaluate(const EvalConfig& cfg);

struct GridPoint {
    int feature_maps = 0;
    double lambda = 0.0;
    double mu = 0.0;
    double l0 = 0.0;
    double growth = 0.0;
    double l1_coeff = 0.0;
    double validation_metric = std::numeric_limits<double>::quiet_NaN();
    bool failed = false;
    std::string error;
};

struct GridOutcome {
    std::vector<GridPoint> ranking;  // best first
    GridPoint selected;
    MetricReport final_report;  // retrained on the full training data
};

/// Chronological 80/20 validation inside the training data, exhaustive sweep,
/// then a full retrain of the winner. Failed points are recorded and skipped.
GridOutcome run_gridsearch(const RunConfig& cfg);

struct GradCheckConfig {
    double step = 1e-5;
    double tolerance = 1e-4;
    bool inject_fault = false;  // corrupt one coordinate to demo pinpointing
    std::uint64_t seed = 1;
};

/// Finite-difference validation across all model kinds and both tasks.
/// Returns true when every check lands as expected.
bool run_gradcheck(const GradCheckConfig& cfg);

struct SynthConfig {
    std::string kind = "planted";  // planted|var
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    // planted
    int train_samples = 2000;
    int test_samples = 1000;
    int attrs = 5;
    int len = 60;
    int jitter = 3;
    double missing_rate = 0.5;
    double amplitude = 3.0;
    double background_rate = 0.1;
    // var
    int steps = 500;
    int lag = 1;
    double noise_sd = 0.05;
};

/// Writes dataset files: planted -> train/ and test/ event datasets,
/// var -> series.csv.
void run_synth(const SynthConfig& cfg);

}  // namespace tdc::cli

#endif
