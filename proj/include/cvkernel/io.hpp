#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvkernel/errors.hpp"
#include "cvkernel/mlkit.hpp"
#include "cvkernel/stellar.hpp"

namespace cvkernel::io {

using json = nlohmann::ordered_json;

inline json stellar_to_json(const stellar::StellarFunction& f) {
    json a = json::array();
    for (const cxd& v : f.A) a.push_back({v.real(), v.imag()});
    json b = json::array();
    for (const cxd& v : f.B) b.push_back({v.real(), v.imag()});
    json beta = json::array();
    for (const auto& [mi, c] : f.beta) {
        json entry;
        entry["idx"] = mi.idx;
        entry["re"] = c.real();
        entry["im"] = c.imag();
        beta.push_back(entry);
    }
    json out;
    out["m"] = f.modes;
    out["A"] = a;
    out["B"] = b;
    out["C"] = {f.C.real(), f.C.imag()};
    out["beta"] = beta;
    out["n"] = f.rank;
    return out;
}

inline stellar::StellarFunction stellar_from_json(const json& j) {
    const int m = j.at("m").get<int>();
    std::vector<cxd> A, B;
    for (const auto& v : j.at("A")) A.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    for (const auto& v : j.at("B")) B.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    const cxd C{j.at("C").at(0).get<double>(), j.at("C").at(1).get<double>()};
    stellar::BetaMap beta;
    for (const auto& e : j.at("beta")) {
        stellar::MultiIndex mi{e.at("idx").get<std::vector<int>>()};
        beta[mi] = cxd{e.at("re").get<double>(), e.at("im").get<double>()};
    }
    auto f = stellar::make_stellar(m, std::move(A), std::move(B), C, std::move(beta));
    if (j.contains("n") && j.at("n").get<int>() != f.rank)
        throw DomainError("stellar_from_json: stated rank disagrees with beta support");
    return f;
}

inline json kernel_spec_to_json(const mlkit::KernelSpec& ks) {
    json out;
    out["family"] = mlkit::family_name(ks.family);
    out["n"] = ks.n;
    out["d"] = ks.d;
    out["bandwidth"] = ks.bandwidth;
    out["parity"] = ks.parity == stellar::CatParity::Even ? "even" : "odd";
    return out;
}

inline mlkit::KernelSpec kernel_spec_from_json(const json& j) {
    mlkit::KernelSpec ks;
    ks.family = mlkit::family_from_name(j.at("family").get<std::string>());
    ks.n = j.value("n", 0);
    ks.d = j.value("d", 2);
    ks.bandwidth = j.value("bandwidth", 1.0);
    ks.parity = j.value("parity", std::string("even")) == "odd" ? stellar::CatParity::Odd
                                                                : stellar::CatParity::Even;
    return ks;
}

inline json model_to_json(const mlkit::TrainedClassifier& model) {
    json out;
    out["kernel_spec"] = kernel_spec_to_json(model.kernel_spec);
    out["C"] = model.C;
    out["bias"] = model.bias;
    out["dual_coeffs"] = model.dual_coeffs;
    json pts = json::array();
    for (const auto& p : model.support_points) pts.push_back({p[0], p[1]});
    out["support_points"] = pts;
    out["support_indices"] = model.support;
    return out;
}

inline mlkit::TrainedClassifier model_from_json(const json& j) {
    mlkit::TrainedClassifier model;
    model.kernel_spec = kernel_spec_from_json(j.at("kernel_spec"));
    model.C = j.at("C").get<double>();
    model.bias = j.at("bias").get<double>();
    model.dual_coeffs = j.at("dual_coeffs").get<std::vector<double>>();
    for (const auto& p : j.at("support_points"))
        model.support_points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    model.support = j.at("support_indices").get<std::vector<int>>();
    if (model.support.size() != model.dual_coeffs.size() ||
        model.support.size() != model.support_points.size())
        throw ShapeError("model_from_json: inconsistent support arrays");
    return model;
}

inline json report_to_json(const mlkit::ExperimentReport& r) {
    json out;
    out["variant"] = r.variant;
    out["encoding"] = kernel_spec_to_json(r.encoding);
    out["seed"] = r.seed;
    out["train_acc"] = r.train_accuracy;
    out["test_acc"] = r.test_accuracy;
    out["support_count"] = r.support_count;
    if (r.wall_time_ms >= 0.0)
        out["wall_time_ms"] = r.wall_time_ms;
    else
        out["wall_time_ms"] = nullptr;
    out["grid_path"] = r.grid_path;
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open output file: " + path);
    os << text;
}

inline std::string read_text(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open input file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

/// Reads `x1,x2,label` CSV (label column optional).
inline mlkit::Dataset read_dataset_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open dataset file: " + path);
    mlkit::Dataset ds;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("x1", 0) == 0) continue; // header
        }
        std::istringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() < 2) throw IoError("malformed dataset row: " + line);
        try {
            ds.points.push_back({std::stod(cells[0]), std::stod(cells[1])});
            ds.labels.push_back(cells.size() > 2 ? std::stoi(cells[2]) : 0);
        } catch (const std::exception&) {
            throw IoError("malformed dataset row: " + line);
        }
    }
    return ds;
}

inline void write_gram_csv(const std::string& path, const mlkit::GramMatrix& g) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open gram output: " + path);
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) {
            if (j) os << ',';
            os << format_double(g.at(i, j));
        }
        os << '\n';
    }
}

} // namespace cvkernel::io
