#include <ddc/io.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace ddc {
namespace {

using json = nlohmann::ordered_json;

json mat_to_json(const Mat& m, const std::string& field) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            double v = m(i, j);
            if (!std::isfinite(v))
                throw std::invalid_argument("save: non-finite entry at " + field + "[" +
                                            std::to_string(i) + "][" + std::to_string(j) + "]");
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat mat_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty())
        throw ParseError("parse: " + field + " must be a non-empty array of rows");
    const auto rows = j.size();
    if (!j[0].is_array() || j[0].empty())
        throw ParseError("parse: " + field + "[0] must be a non-empty array");
    const auto cols = j[0].size();
    Mat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw ParseError("parse: ragged row at " + field + "[" + std::to_string(i) + "]");
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[i][c].is_number())
                throw ParseError("parse: non-numeric entry at " + field + "[" +
                                 std::to_string(i) + "][" + std::to_string(c) + "]");
            m(i, c) = j[i][c].get<double>();
        }
    }
    return m;
}

json load_document(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("parse: cannot open " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ParseError("parse: malformed JSON in " + path.string());
    return j;
}

void write_document(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save: cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("save: write failed for " + path.string());
}

const json& require(const json& j, const std::string& key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError("parse: missing field '" + key + "' in " + where);
    return *it;
}

json runs_to_json(const ExperimentRecord& record, const std::string& field) {
    json runs = json::array();
    for (std::size_t r = 0; r < record.runs.size(); ++r) {
        const Trajectory& t = record.runs[r];
        auto vecs = [&](const std::vector<Vec>& vs, const char* what) {
            json arr = json::array();
            for (std::size_t k = 0; k < vs.size(); ++k) {
                Mat row = vs[k].transpose();
                arr.push_back(mat_to_json(row, field + ".runs[" + std::to_string(r) + "]." +
                                                   what)[0]);
            }
            return arr;
        };
        json run;
        run["states"] = vecs(t.states, "states");
        run["inputs"] = vecs(t.inputs, "inputs");
        run["outputs"] = vecs(t.outputs, "outputs");
        runs.push_back(std::move(run));
    }
    return runs;
}

json noises_to_json(const ExperimentRecord& record, const std::string& field) {
    json arr = json::array();
    for (std::size_t r = 0; r < record.runs.size(); ++r) {
        json one = json::array();
        for (std::size_t k = 0; k < record.runs[r].noises.size(); ++k)
            one.push_back(mat_to_json(record.runs[r].noises[k].transpose(),
                                      field + ".noises[" + std::to_string(r) + "]")[0]);
        arr.push_back(std::move(one));
    }
    return arr;
}

json meta_to_json(const ExperimentFileMeta& meta) {
    json j;
    j["s0"] = meta.s0;
    j["delta"] = meta.delta;
    j["l"] = meta.l;
    j["seed"] = meta.seed;
    return j;
}

ExperimentFileMeta meta_from_json(const json& j, const std::string& where) {
    ExperimentFileMeta meta;
    meta.s0 = require(j, "s0", where).get<double>();
    meta.delta = require(j, "delta", where).get<double>();
    meta.l = require(j, "l", where).get<int>();
    meta.seed = require(j, "seed", where).get<std::uint64_t>();
    return meta;
}

}  // namespace

void save_matrix_file(const std::filesystem::path& path,
                      const std::map<std::string, Mat>& mats) {
    json j;
    for (const auto& [name, m] : mats) j[name] = mat_to_json(m, name);
    write_document(path, j);
}

std::map<std::string, Mat> load_matrix_file(const std::filesystem::path& path) {
    json j = load_document(path);
    if (!j.is_object()) throw ParseError("parse: " + path.string() + " must be a JSON object");
    std::map<std::string, Mat> out;
    for (auto it = j.begin(); it != j.end(); ++it)
        out[it.key()] = mat_from_json(it.value(), path.string() + ":" + it.key());
    return out;
}

void save_plant(const std::filesystem::path& path, const PlantModel& plant) {
    plant.validate();
    json j;
    j["A"] = mat_to_json(plant.A, "A");
    j["B"] = mat_to_json(plant.B, "B");
    j["Bw"] = mat_to_json(plant.Bw, "Bw");
    j["C"] = mat_to_json(plant.C, "C");
    j["D"] = mat_to_json(plant.D, "D");
    write_document(path, j);
}

PlantModel load_plant(const std::filesystem::path& path) {
    json j = load_document(path);
    const std::string where = path.string();
    PlantModel plant;
    plant.A = mat_from_json(require(j, "A", where), where + ":A");
    plant.B = mat_from_json(require(j, "B", where), where + ":B");
    plant.Bw = mat_from_json(require(j, "Bw", where), where + ":Bw");
    plant.C = mat_from_json(require(j, "C", where), where + ":C");
    plant.D = mat_from_json(require(j, "D", where), where + ":D");
    try {
        plant.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError("parse: " + where + ": " + e.what());
    }
    return plant;
}

void save_experiment1(const std::filesystem::path& path, const ExperimentRecord& record,
                      const Experiment1Aggregate& agg, const ExperimentFileMeta& meta,
                      bool with_oracle) {
    json j;
    j["meta"] = meta_to_json(meta);
    json a;
    a["N"] = mat_to_json(agg.N, "N");
    a["M"] = mat_to_json(agg.M, "M");
    a["V"] = mat_to_json(agg.V, "V");
    a["T"] = mat_to_json(agg.T, "T");
    a["X"] = mat_to_json(agg.X, "X");
    a["Y"] = mat_to_json(agg.Y, "Y");
    j["aggregate"] = std::move(a);
    j["runs"] = runs_to_json(record, "exp1");
    if (with_oracle) {
        json oracle;
        oracle["W"] = mat_to_json(agg.oracle_W, "oracle.W");
        oracle["noises"] = noises_to_json(record, "exp1");
        j["oracle"] = std::move(oracle);
    }
    write_document(path, j);
}

void save_experiment2(const std::filesystem::path& path, const ExperimentRecord& record,
                      const Experiment2Aggregate& agg, const ExperimentFileMeta& meta,
                      bool with_oracle) {
    json j;
    j["meta"] = meta_to_json(meta);
    json a;
    a["R0"] = mat_to_json(agg.R0, "R0");
    a["R1"] = mat_to_json(agg.R1, "R1");
    a["Xp"] = mat_to_json(agg.Xp, "Xp");
    a["Yp"] = mat_to_json(agg.Yp, "Yp");
    j["aggregate"] = std::move(a);
    j["runs"] = runs_to_json(record, "exp2");
    if (with_oracle) {
        json oracle;
        oracle["W0"] = mat_to_json(agg.oracle_W0, "oracle.W0");
        oracle["noises"] = noises_to_json(record, "exp2");
        j["oracle"] = std::move(oracle);
    }
    write_document(path, j);
}

LoadedExperiment1 load_experiment1(const std::filesystem::path& path) {
    json j = load_document(path);
    const std::string where = path.string();
    LoadedExperiment1 out;
    out.meta = meta_from_json(require(j, "meta", where), where + ":meta");
    const json& a = require(j, "aggregate", where);
    out.agg.N = mat_from_json(require(a, "N", where), where + ":N");
    out.agg.M = mat_from_json(require(a, "M", where), where + ":M");
    out.agg.V = mat_from_json(require(a, "V", where), where + ":V");
    out.agg.T = mat_from_json(require(a, "T", where), where + ":T");
    out.agg.X = mat_from_json(require(a, "X", where), where + ":X");
    out.agg.Y = mat_from_json(require(a, "Y", where), where + ":Y");
    if (j.contains("oracle")) {
        out.agg.oracle_W = mat_from_json(require(j["oracle"], "W", where), where + ":oracle.W");
        out.has_oracle = true;
    } else {
        out.agg.oracle_W = Mat::Zero(0, 0);
    }
    return out;
}

LoadedExperiment2 load_experiment2(const std::filesystem::path& path) {
    json j = load_document(path);
    const std::string where = path.string();
    LoadedExperiment2 out;
    out.meta = meta_from_json(require(j, "meta", where), where + ":meta");
    const json& a = require(j, "aggregate", where);
    out.agg.R0 = mat_from_json(require(a, "R0", where), where + ":R0");
    out.agg.R1 = mat_from_json(require(a, "R1", where), where + ":R1");
    out.agg.Xp = mat_from_json(require(a, "Xp", where), where + ":Xp");
    out.agg.Yp = mat_from_json(require(a, "Yp", where), where + ":Yp");
    if (j.contains("oracle")) {
        out.agg.oracle_W0 =
            mat_from_json(require(j["oracle"], "W0", where), where + ":oracle.W0");
        out.has_oracle = true;
    } else {
        out.agg.oracle_W0 = Mat::Zero(0, 0);
    }
    return out;
}

void save_descriptor(const std::filesystem::path& path, const DescriptorData& d) {
    json j;
    j["Ed"] = mat_to_json(d.Ed, "Ed");
    j["Ad"] = mat_to_json(d.Ad, "Ad");
    j["Bd"] = mat_to_json(d.Bd, "Bd");
    j["Cd"] = mat_to_json(d.Cd, "Cd");
    j["Dd"] = mat_to_json(d.Dd, "Dd");
    j["Ke"] = mat_to_json(d.Ke, "Ke");
    j["Ka"] = mat_to_json(d.Ka, "Ka");
    j["Kb"] = mat_to_json(d.Kb, "Kb");
    j["s0"] = d.s0;
    j["delta"] = d.delta;
    j["l"] = d.l;
    j["n"] = d.n;
    j["m"] = d.m;
    write_document(path, j);
}

DescriptorData load_descriptor(const std::filesystem::path& path) {
    json j = load_document(path);
    const std::string where = path.string();
    DescriptorData d;
    d.Ed = mat_from_json(require(j, "Ed", where), where + ":Ed");
    d.Ad = mat_from_json(require(j, "Ad", where), where + ":Ad");
    d.Bd = mat_from_json(require(j, "Bd", where), where + ":Bd");
    d.Cd = mat_from_json(require(j, "Cd", where), where + ":Cd");
    d.Dd = mat_from_json(require(j, "Dd", where), where + ":Dd");
    d.Ke = mat_from_json(require(j, "Ke", where), where + ":Ke");
    d.Ka = mat_from_json(require(j, "Ka", where), where + ":Ka");
    d.Kb = mat_from_json(require(j, "Kb", where), where + ":Kb");
    d.s0 = require(j, "s0", where).get<double>();
    d.delta = require(j, "delta", where).get<double>();
    d.l = require(j, "l", where).get<int>();
    d.n = require(j, "n", where).get<int>();
    d.m = require(j, "m", where).get<int>();
    return d;
}

void save_controller(const std::filesystem::path& path, const ControllerGain& gain) {
    json j;
    j["F"] = mat_to_json(gain.F, "F");
    j["method"] = gain.method;
    if (gain.gamma) j["gamma"] = *gain.gamma;
    j["eps"] = gain.eps;
    j["margins"] = gain.margins;
    j["seed_provenance"] = gain.seed_provenance;
    write_document(path, j);
}

ControllerGain load_controller(const std::filesystem::path& path) {
    json j = load_document(path);
    const std::string where = path.string();
    ControllerGain gain;
    gain.F = mat_from_json(require(j, "F", where), where + ":F");
    gain.method = require(j, "method", where).get<std::string>();
    if (j.contains("gamma")) gain.gamma = j["gamma"].get<double>();
    if (j.contains("eps")) gain.eps = j["eps"].get<double>();
    if (j.contains("margins")) gain.margins = j["margins"].get<std::vector<double>>();
    if (j.contains("seed_provenance"))
        gain.seed_provenance = j["seed_provenance"].get<std::string>();
    return gain;
}

std::string report_to_json(const VerificationReport& report) {
    json j;
    j["spectral_radius"] = report.spectral_radius;
    j["stable"] = report.stable;
    if (std::isfinite(report.hinf_norm))
        j["hinf_norm"] = report.hinf_norm;
    else
        j["hinf_norm"] = nullptr;
    j["empirical_energy_ratios"] = report.empirical_energy_ratios;
    if (report.gamma_target) j["gamma_target"] = *report.gamma_target;
    j["skipped_trials"] = report.skipped_trials;
    j["pass"] = report.pass();
    return j.dump(2);
}

namespace {

void append_vec(std::string& line, const Vec& v) {
    char buf[64];
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, ",%.17g", v(i));
        line += buf;
    }
}

}  // namespace

void save_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save: cannot open " + path.string() + " for writing");
    const int n = static_cast<int>(traj.states.front().size());
    const int m = static_cast<int>(traj.inputs.front().size());
    const int q = static_cast<int>(traj.noises.front().size());
    const int p = static_cast<int>(traj.outputs.front().size());
    std::string header = "k";
    auto extend = [&](const char* prefix, int count) {
        for (int i = 1; i <= count; ++i) header += "," + std::string(prefix) + std::to_string(i);
    };
    extend("x", n);
    extend("u", m);
    extend("w", q);
    extend("y", p);
    out << header << '\n';
    for (int k = 0; k < traj.length(); ++k) {
        std::string line = std::to_string(k);
        append_vec(line, traj.states[k]);
        append_vec(line, traj.inputs[k]);
        append_vec(line, traj.noises[k]);
        append_vec(line, traj.outputs[k]);
        out << line << '\n';
    }
}

void save_outputs_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save: cannot open " + path.string() + " for writing");
    const int p = static_cast<int>(traj.outputs.front().size());
    std::string header = "k";
    for (int i = 1; i <= p; ++i) header += ",y" + std::to_string(i);
    out << header << '\n';
    for (int k = 0; k < traj.length(); ++k) {
        std::string line = std::to_string(k);
        append_vec(line, traj.outputs[k]);
        out << line << '\n';
    }
}

}  // namespace ddc
