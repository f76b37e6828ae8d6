#pragma once

#include <openssl/evp.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "medium.hpp"

namespace bnf {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct KappaGrid {
    double lo = 1.0, hi = 2.0, step = 0.01;

    std::vector<double> points() const {
        if (!(step > 0) || hi < lo) throw ConfigError("grid needs lo ≤ hi and step > 0");
        const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
        std::vector<double> k;
        for (long i = 0; i <= n; ++i) k.push_back(lo + i * step);
        return k;
    }
};

struct RunConfig {
    MediumParams params = MediumParams::deep(1.0, 1.37, 1.0);
    int J = 4;
    int N = 1;
    std::vector<double> eps{1e-2, 5e-3};
    std::optional<double> horizon;  // default 50/|ω_1|
    std::optional<double> dt;       // default 0.25/max|Ω|
    std::uint64_t seed = 1;
    std::string out = "wwlab-out";
    KappaGrid grid;
    std::optional<int> maxdeg;  // default N + 2
    std::vector<double> tau{6.0};
    std::optional<double> threshold;
    int sample_every = 1;
    std::string model;  // serialized Hamiltonian to load instead of building one

    int certificate_degree() const { return maxdeg.value_or(N + 2); }

    void validate() const {
        params.validate();
        if (J < 2) throw ConfigError("box must have J ≥ 2");
        if (N < 0) throw ConfigError("order must be nonnegative");
        if (eps.empty()) throw ConfigError("eps list is empty");
        for (double e : eps)
            if (!(e > 0)) throw ConfigError("eps must be positive");
        if (horizon && !(*horizon > 0)) throw ConfigError("horizon must be positive");
        if (dt && !(*dt > 0)) throw ConfigError("dt must be positive");
        if (sample_every < 1) throw ConfigError("sample_every must be ≥ 1");
        if (maxdeg && *maxdeg < 1) throw ConfigError("maxdeg must be ≥ 1");
        if (tau.empty()) throw ConfigError("tau list is empty");
        if (threshold && !(*threshold >= 0)) throw ConfigError("threshold must be nonnegative");
        grid.points();
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

inline double to_double(const std::string& v, const std::string& key) {
    if (v == "inf") return INFINITY;
    size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("bad number for " + key + ": '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError("bad number for " + key + ": '" + v + "'");
    return x;
}

inline long to_long(const std::string& v, const std::string& key) {
    size_t pos = 0;
    long x;
    try {
        x = std::stol(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("bad integer for " + key + ": '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError("bad integer for " + key + ": '" + v + "'");
    return x;
}

inline std::vector<double> to_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item), key));
    return out;
}

inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s;
}

}  // namespace detail

inline KappaGrid parse_grid(const std::string& v) {
    std::vector<std::string> parts;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(detail::trim(item));
    if (parts.size() != 3) throw ConfigError("grid must be A:B:STEP");
    return {detail::to_double(parts[0], "grid"), detail::to_double(parts[1], "grid"),
            detail::to_double(parts[2], "grid")};
}

// sets one key; unknown keys are rejected
inline void set_key(RunConfig& c, const std::string& key, const std::string& v) {
    using namespace detail;
    if (key == "g") c.params.g = to_double(v, key);
    else if (key == "kappa") c.params.kappa = to_double(v, key);
    else if (key == "gamma") c.params.gamma = to_double(v, key);
    else if (key == "depth") {
        const double h = to_double(v, key);
        c.params.h = h;
        c.params.depth = std::isinf(h) ? Depth::infinite : Depth::finite;
    } else if (key == "box") c.J = int(to_long(v, key));
    else if (key == "order") c.N = int(to_long(v, key));
    else if (key == "eps") c.eps = to_list(v, key);
    else if (key == "horizon") c.horizon = to_double(v, key);
    else if (key == "dt") c.dt = to_double(v, key);
    else if (key == "seed") {
        const long s = to_long(v, key);
        if (s < 0) throw ConfigError("seed must be nonnegative");
        c.seed = std::uint64_t(s);
    } else if (key == "out") c.out = v;
    else if (key == "grid") c.grid = parse_grid(v);
    else if (key == "maxdeg") c.maxdeg = int(to_long(v, key));
    else if (key == "tau_list") c.tau = to_list(v, key);
    else if (key == "threshold") c.threshold = to_double(v, key);
    else if (key == "sample_every") c.sample_every = int(to_long(v, key));
    else if (key == "model") c.model = v;
    else throw ConfigError("unknown key '" + key + "'");
}

// "key = value" lines; '#' starts a comment
inline RunConfig parse_config(std::istream& in) {
    RunConfig c;
    std::map<std::string, int> seen;
    std::string line;
    for (int ln = 1; std::getline(in, line); ++ln) {
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(ln) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq)), value = detail::trim(line.substr(eq + 1));
        if (seen.count(key)) throw ConfigError("line " + std::to_string(ln) + ": duplicate key '" + key + "'");
        seen[key] = ln;
        try {
            set_key(c, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(ln) + ": " + e.what());
        }
    }
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return parse_config(in);
}

// every key in a fixed order; the input of the digest
inline std::string canonical(const RunConfig& c) {
    using detail::fmt;
    std::ostringstream s;
    s << "g=" << fmt(c.params.g) << "\nkappa=" << fmt(c.params.kappa) << "\ngamma=" << fmt(c.params.gamma)
      << "\ndepth=" << (c.params.depth == Depth::infinite ? "inf" : fmt(c.params.h)) << "\nbox=" << c.J
      << "\norder=" << c.N << "\neps=" << detail::fmt_list(c.eps)
      << "\nhorizon=" << (c.horizon ? fmt(*c.horizon) : "auto") << "\ndt=" << (c.dt ? fmt(*c.dt) : "auto")
      << "\nseed=" << c.seed << "\nout=" << c.out << "\ngrid=" << fmt(c.grid.lo) << ":" << fmt(c.grid.hi) << ":"
      << fmt(c.grid.step) << "\nmaxdeg=" << c.certificate_degree() << "\ntau_list=" << detail::fmt_list(c.tau)
      << "\nthreshold=" << (c.threshold ? fmt(*c.threshold) : "auto") << "\nsample_every=" << c.sample_every
      << "\nmodel=" << c.model << "\n";
    return s.str();
}

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

inline std::string config_digest(const RunConfig& c) { return sha256_hex(canonical(c)); }

}  // namespace bnf
