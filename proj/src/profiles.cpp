#include "greenopt/profiles.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "greenopt/config_file.hpp"

namespace greenopt {

const DatasetProfile& ProfileLibrary::energy_profile(const std::string& id) const {
    auto it = energy.find(id);
    if (it == energy.end())
        throw std::invalid_argument("unknown dataset profile '" + id + "'");
    return it->second;
}

const AccuracyModel& ProfileLibrary::accuracy_model(const std::string& id) const {
    auto it = accuracy.find(id);
    if (it == accuracy.end())
        throw std::invalid_argument("unknown dataset profile '" + id + "'");
    return it->second;
}

ProfileLibrary ProfileLibrary::builtin() {
    // Mirrors data/profiles.cfg; test_objectives asserts the two stay equal.
    ProfileLibrary lib;
    lib.energy["fashionmnist"] = {"fashionmnist", 825.3632, 0.953, 0.049, 0.027};
    lib.energy["cifar10"] = {"cifar10", 2631.7334, 0.664, 0.066, 0.029};
    lib.accuracy["fashionmnist"] = {"fashionmnist", 0.887, 0.889, 0.010, 0.011, 0.9, 0.6, 0.62};
    lib.accuracy["cifar10"] = {"cifar10", 0.611, 0.673, 0.021, 0.056, 0.9, 0.6, 0.62};
    return lib;
}

ProfileLibrary ProfileLibrary::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open profiles file: " + path);
    std::string first;
    std::getline(in, first);
    if (first != "# greenopt-profiles v1")
        throw std::runtime_error(path + ": bad profiles header");
    std::stringstream rest;
    rest << in.rdbuf();
    const TextConfig cfg = TextConfig::parse_string(rest.str(), path);

    ProfileLibrary lib = builtin();
    for (const auto& section : cfg.section_names()) {
        if (section.empty())
            continue;
        DatasetProfile p;
        p.id = section;
        p.base_joules = cfg.require_double(section, "base_joules");
        p.delta_conv = cfg.require_double(section, "delta_conv");
        p.delta_linear = cfg.require_double(section, "delta_linear");
        p.delta_relu = cfg.require_double(section, "delta_relu");
        AccuracyModel a;
        a.id = section;
        a.acc_conv1 = cfg.require_double(section, "acc_conv1");
        a.acc_conv4 = cfg.require_double(section, "acc_conv4");
        a.std_conv1 = cfg.require_double(section, "std_conv1");
        a.std_conv4 = cfg.require_double(section, "std_conv4");
        a.tune_floor = cfg.get_double(section, "tune_floor", 0.9);
        a.tune_width = cfg.get_double(section, "tune_width", 0.6);
        a.optimum_coord = cfg.get_double(section, "tune_optimum", 0.62);
        lib.energy[section] = p;
        lib.accuracy[section] = a;
    }
    return lib;
}

}  // namespace greenopt
