#pragma once

#include <map>
#include <string>

#include "greenopt/energy.hpp"

namespace greenopt {

// Simulated-trainer accuracy model: score = cap(conv_layers) * tune(config),
// where cap saturates between acc_conv1 and acc_conv4 and tune peaks at 1.0
// at the hidden optimum (optimum_coord in every unit-cube dimension).
struct AccuracyModel {
    std::string id;
    double acc_conv1;
    double acc_conv4;
    double std_conv1;  // per-cluster observation noise std
    double std_conv4;
    double tune_floor = 0.9;
    double tune_width = 0.6;
    double optimum_coord = 0.62;
};

struct ProfileLibrary {
    std::map<std::string, DatasetProfile> energy;
    std::map<std::string, AccuracyModel> accuracy;

    const DatasetProfile& energy_profile(const std::string& id) const;
    const AccuracyModel& accuracy_model(const std::string& id) const;

    static ProfileLibrary builtin();
    // Parses a "# greenopt-profiles v1" file; entries replace builtin ones.
    static ProfileLibrary load(const std::string& path);
};

}  // namespace greenopt
