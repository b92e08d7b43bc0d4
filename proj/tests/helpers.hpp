#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "dataset.hpp"
#include "framing.hpp"
#include "ingest.hpp"
#include "vocabulary.hpp"

namespace testing {

inline std::string pid(std::size_t i) {
    std::string s = std::to_string(i);
    return "p" + std::string(4 - std::min<std::size_t>(4, s.size()), '0') + s;
}

/// Dense dataset with uniform [0,1) cells and random labels containing both
/// classes.
inline ppmf::Dataset random_dataset(std::size_t n, std::uint64_t seed, std::size_t block = 24,
                                    double positive_rate = 0.4) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ppmf::Dataset d(block);
    std::vector<double> row(d.dims());
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& x : row) x = u(eng);
        int label = u(eng) < positive_rate ? 1 : 0;
        if (i == 0) label = 1;
        if (i == 1) label = 0;
        d.add(pid(i), label, row);
    }
    return d;
}

/// Dataset where every cell of variable `informative` carries the label
/// signal and everything else is noise.
inline ppmf::Dataset planted_dataset(std::size_t n, std::uint64_t seed, std::size_t informative,
                                     std::size_t block = 24) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ppmf::Dataset d(block);
    std::vector<double> row(d.dims());
    for (std::size_t i = 0; i < n; ++i) {
        const int label = i % 3 == 0 ? 1 : 0;
        for (auto& x : row) x = u(eng);
        const auto off = d.offset(informative);
        for (std::size_t c = 0; c < d.width(informative); ++c)
            row[off + c] = std::clamp(0.3 + 0.4 * label + 0.15 * (u(eng) - 0.5), 0.0, 1.0);
        d.add(pid(i), label, row);
    }
    return d;
}

inline ppmf::ingest::PatientRecord record(int label, std::vector<std::tuple<int, std::string, double>> events,
                                          const std::string& id = "p1") {
    ppmf::ingest::PatientRecord r;
    r.label = label;
    for (auto& [minute, name, value] : events) r.events.push_back({id, minute, *ppmf::variable_index(name), value});
    std::stable_sort(r.events.begin(), r.events.end(), [](const auto& a, const auto& b) {
        return a.minute != b.minute ? a.minute < b.minute : a.variable < b.variable;
    });
    return r;
}

}  // namespace testing
