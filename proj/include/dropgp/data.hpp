#pragma once

// CSV dataset I/O, the flat key=value run configuration, and the bundled
// synthetic-data generators.
//
// Data format: headered CSV. Regression targets are columns named y_*, the
// classification target is a `label` column with 1-based classes; every
// other column is a feature.

#include <map>
#include <string>

#include "dropgp/network.hpp"
#include "dropgp/trainer.hpp"

namespace dropgp {

struct LoadedData {
    Dataset data;
    bool has_targets = false;
    std::vector<std::string> feature_names;
    std::vector<std::string> target_names;
};

LoadedData load_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header = {});

struct RunConfig {
    std::vector<std::size_t> widths;
    Nonlinearity nonlinearity = Nonlinearity::relu;
    bool scale_features = false;
    bool output_bias = false;
    bool classification = false;
    std::vector<double> keep_probs;

    // Exactly one of tau / lambda1 is given; the other follows from
    // tau = l^2 p1 / (2 N lambda1) once N is known.
    double tau = 0.0;      // 0 = not given
    double lambda1 = 0.0;  // 0 = not given
    double lengthscale = 1.0;
    double lengthscale_out = 1.0;

    SgdSchedule schedule;
    std::uint64_t seed = 0;
    std::size_t predict_samples = 1000;  // T

    void validate() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

// Resolves the tau <-> lambda1 pairing for a dataset of size n and builds the
// per-layer decay vectors.
struct ResolvedHyper {
    HyperParams hyper;
    double tau;
};
ResolvedHyper resolve_hyper(const RunConfig& cfg, std::size_t n);

// Synthetic datasets. sine-gap: y = sin(2x) + noise, x on [-3,-1] u [1,3].
// two-moons: two interleaved half circles, labels 1/2.
Dataset make_sine_gap(std::size_t n, double noise, RngState& rng);
Dataset make_two_moons(std::size_t n, double noise, RngState& rng);
void write_dataset_csv(const std::string& path, const Dataset& data);

} // namespace dropgp
