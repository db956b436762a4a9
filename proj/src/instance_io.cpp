// SPDX-License-Identifier: Apache-2.0

#include "rgsbf/instance_io.hpp"

#include <cmath>

#include "rgsbf/errors.hpp"

namespace rgsbf {

namespace {

using nlohmann::json;

const json& need(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("instance: missing '") + key + "'");
    return j.at(key);
}

std::vector<double> broadcast(const json& j, const char* key, std::size_t n, double fallback, bool required) {
    if (!j.contains(key)) {
        if (required) throw ConfigError(std::string("instance: missing '") + key + "'");
        return std::vector<double>(n, fallback);
    }
    const json& v = j.at(key);
    if (v.is_number()) return std::vector<double>(n, v.get<double>());
    auto out = v.get<std::vector<double>>();
    if (out.size() != n) throw ConfigError(std::string("instance: '") + key + "' has the wrong length");
    return out;
}

cplx to_cplx(const json& v) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (!v.is_array() || v.size() != 2) throw ConfigError("instance: complex entries are [re, im] pairs");
    return {v[0].get<double>(), v[1].get<double>()};
}

json from_cplx(cplx z) { return json::array({z.real(), z.imag()}); }

json vector_json(const CVector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(from_cplx(v(i)));
    return a;
}

}  // namespace

NetworkInstance instance_from_json(const json& j) {
    try {
        NetworkInstance inst;
        inst.antennas = need(j, "antennas").get<std::vector<int>>();
        inst.L = static_cast<int>(inst.antennas.size());
        for (int a : inst.antennas) {
            if (a < 1) throw ConfigError("instance: every RRH needs at least one antenna");
            inst.offsets.push_back(inst.N);
            inst.N += a;
        }
        inst.groups = need(j, "groups").get<std::vector<std::vector<int>>>();
        inst.M = static_cast<int>(inst.groups.size());
        for (const auto& g : inst.groups) inst.K += static_cast<int>(g.size());
        inst.group_of.assign(static_cast<std::size_t>(inst.K), -1);
        for (int m = 0; m < inst.M; ++m) {
            for (int k : inst.groups[static_cast<std::size_t>(m)]) {
                if (k < 0 || k >= inst.K) throw ConfigError("instance: group member out of range");
                inst.group_of[static_cast<std::size_t>(k)] = m;
            }
        }
        const json& h = need(j, "h_hat");
        if (!h.is_array() || static_cast<int>(h.size()) != inst.K) throw ConfigError("instance: need one h_hat per MU");
        for (const auto& row : h) {
            if (static_cast<int>(row.size()) != inst.N) throw ConfigError("instance: h_hat rows must have N entries");
            CVector v(inst.N);
            for (int n = 0; n < inst.N; ++n) v(n) = to_cplx(row[static_cast<std::size_t>(n)]);
            inst.h_hat.push_back(v);
        }
        const auto kk = static_cast<std::size_t>(inst.K);
        const auto ll = static_cast<std::size_t>(inst.L);
        if (j.contains("theta")) {
            const json& t = j.at("theta");
            if (t.size() != kk) throw ConfigError("instance: need one theta per MU");
            for (const auto& mat : t) {
                if (static_cast<int>(mat.size()) != inst.N) throw ConfigError("instance: theta must be N x N");
                CMatrix d(inst.N, inst.N);
                for (int r = 0; r < inst.N; ++r) {
                    if (static_cast<int>(mat[static_cast<std::size_t>(r)].size()) != inst.N) throw ConfigError("instance: theta must be N x N");
                    for (int c = 0; c < inst.N; ++c) d(r, c) = to_cplx(mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
                }
                inst.theta.emplace_back(d);
            }
        } else {
            for (double eps : broadcast(j, "error_radius", kk, 0.0, true)) {
                if (!(eps > 0.0)) throw ConfigError("instance: error_radius must be positive");
                inst.theta.push_back(HermitianMatrix::diagonal(RVector::Constant(inst.N, 1.0 / (eps * eps))));
            }
        }
        for (double db : broadcast(j, "sinr_db", kk, 0.0, true)) inst.gamma.push_back(db_to_linear(db));
        inst.sigma2 = broadcast(j, "noise_power", kk, 1.0, false);
        inst.p_max = broadcast(j, "p_max", ll, 10.0, false);
        inst.p_fronthaul = broadcast(j, "p_fronthaul", ll, 0.0, true);
        inst.eta = broadcast(j, "eta", ll, 0.25, false);
        inst.validate();
        return inst;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("instance: ") + e.what());
    }
}

json instance_to_json(const NetworkInstance& inst) {
    json j;
    j["antennas"] = inst.antennas;
    j["groups"] = inst.groups;
    json h = json::array();
    for (const auto& v : inst.h_hat) h.push_back(vector_json(v));
    j["h_hat"] = h;
    json t = json::array();
    for (const auto& th : inst.theta) {
        json mat = json::array();
        const CMatrix d = th.dense();
        for (Eigen::Index r = 0; r < d.rows(); ++r) mat.push_back(vector_json(d.row(r).transpose()));
        t.push_back(mat);
    }
    j["theta"] = t;
    std::vector<double> db;
    for (double g : inst.gamma) db.push_back(10.0 * std::log10(g));
    j["sinr_db"] = db;
    j["noise_power"] = inst.sigma2;
    j["p_max"] = inst.p_max;
    j["p_fronthaul"] = inst.p_fronthaul;
    j["eta"] = inst.eta;
    return j;
}

json outcome_to_json(const NetworkInstance& inst, const MethodOutcome& o, const std::string& method) {
    json j;
    j["method"] = method;
    j["ok"] = o.ok;
    if (!o.ok) {
        j["failure"] = o.failure;
        return j;
    }
    const BeamformingSolution& s = o.solution;
    j["active"] = s.active;
    j["network_power"] = s.network_power;
    j["transmit_power"] = transmit_power(inst, s);
    j["fronthaul_power"] = fronthaul_power(inst, s.active);
    j["sdr_objective"] = o.sdr_objective;
    j["margins"] = s.margins;
    j["recovery"] = to_string(o.recovery);
    json beams = json::array();
    for (const auto& per_rrh : s.v) {
        json r = json::array();
        for (const auto& v : per_rrh) r.push_back(vector_json(v));
        beams.push_back(r);
    }
    j["beams"] = beams;
    return j;
}

}  // namespace rgsbf
