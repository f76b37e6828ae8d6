#pragma once

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "config.hpp"
#include "integrator.hpp"

namespace bnf {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Text formats. Coefficients are written with 17 significant digits, so a load
// after a save reproduces every double exactly.
//
//   Hamiltonian:  "hamiltonian J=<J> terms=<n>" then one line per monomial
//                 "deg <d> | <j>:<+|->:<exp> ... | <re> <im>"
//   pluri-map:    "plurimap J=<J> linear=<0|1> entries=<n>" then one line per coefficient
//                 "<lin|nl> <row> <col> | deg <d> | <monomial> | <re> <im>"
// with row and col as "<j>:<+|->" slots.

namespace io_detail {

inline std::string fmt(double x) { return detail::fmt(x); }

inline std::string slot_str(Slot s) { return std::to_string(s.mode) + (s.sign > 0 ? ":+" : ":-"); }

inline std::string monomial_str(const MultiIndex& m) {
    std::string s;
    for (const auto& e : m.entries()) {
        if (e.alpha) s += (s.empty() ? "" : " ") + std::to_string(e.mode) + ":+:" + std::to_string(e.alpha);
        if (e.beta) s += (s.empty() ? "" : " ") + std::to_string(e.mode) + ":-:" + std::to_string(e.beta);
    }
    return s;
}

inline Slot parse_slot(const std::string& tok) {
    const auto c = tok.find(':');
    if (c == std::string::npos || c + 2 != tok.size() || (tok[c + 1] != '+' && tok[c + 1] != '-'))
        throw FormatError("bad slot '" + tok + "'");
    return {int(detail::to_long(tok.substr(0, c), "slot")), tok[c + 1] == '+' ? 1 : -1};
}

inline MultiIndex parse_monomial(const std::string& text) {
    MultiIndex m;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        const auto c = tok.rfind(':');
        if (c == std::string::npos) throw FormatError("bad factor '" + tok + "'");
        const Slot s = parse_slot(tok.substr(0, c));
        const long e = detail::to_long(tok.substr(c + 1), "exponent");
        if (e <= 0) throw FormatError("bad exponent in '" + tok + "'");
        m.multiply(s, int(e));
    }
    return m;
}

inline Complex parse_complex(const std::string& text) {
    std::istringstream in(text);
    std::string re, im, extra;
    if (!(in >> re >> im) || (in >> extra)) throw FormatError("bad coefficient '" + text + "'");
    return {detail::to_double(re, "re"), detail::to_double(im, "im")};
}

inline std::vector<std::string> split_bars(const std::string& line) {
    std::vector<std::string> parts;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, '|')) parts.push_back(detail::trim(item));
    return parts;
}

inline int parse_header_int(const std::string& header, const std::string& key) {
    const auto at = header.find(" " + key + "=");
    if (at == std::string::npos) throw FormatError("header lacks " + key);
    const auto start = at + key.size() + 2;
    return int(detail::to_long(header.substr(start, header.find(' ', start) - start), key));
}

inline int parse_degree(const std::string& part, const MultiIndex& m) {
    if (part.rfind("deg ", 0) != 0) throw FormatError("expected 'deg <d>'");
    const long d = detail::to_long(detail::trim(part.substr(4)), "deg");
    if (d != m.length()) throw FormatError("degree does not match monomial");
    return int(d);
}

inline std::string term_line(const MultiIndex& m, Complex c) {
    return "deg " + std::to_string(m.length()) + " | " + monomial_str(m) + " | " + fmt(c.real()) + " " +
           fmt(c.imag());
}

}  // namespace io_detail

inline void write_hamiltonian(std::ostream& out, const PolyHamiltonian& H) {
    out << "hamiltonian J=" << H.box().J << " terms=" << H.size() << "\n";
    for (const auto& [m, c] : H.poly()) out << io_detail::term_line(m, c) << "\n";
}

inline PolyHamiltonian read_hamiltonian(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("hamiltonian ", 0) != 0) throw FormatError("not a hamiltonian file");
    const int J = io_detail::parse_header_int(line, "J"), n = io_detail::parse_header_int(line, "terms");
    if (J < 1) throw FormatError("bad box");
    PolyHamiltonian H{Box{J}};
    int count = 0;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        const auto parts = io_detail::split_bars(line);
        if (parts.size() != 3) throw FormatError("expected 3 fields: '" + line + "'");
        const MultiIndex m = io_detail::parse_monomial(parts[1]);
        io_detail::parse_degree(parts[0], m);
        if (H.coeff(m) != Complex(0.0)) throw FormatError("repeated monomial");
        H.add(m, io_detail::parse_complex(parts[2]));
        ++count;
    }
    if (count != n) throw FormatError("term count mismatch");
    return H;
}

inline void write_plurimap(std::ostream& out, const PluriMap<Complex>& M) {
    const Box& b = M.box;
    auto count = [&](const OpPoly<Complex>& A) {
        size_t n = 0;
        for (const auto& p : A.e) n += p.size();
        return n;
    };
    const size_t n = count(M.nonlinear) + (M.linear ? count(*M.linear) : 0);
    out << "plurimap J=" << b.J << " linear=" << (M.linear ? 1 : 0) << " entries=" << n << "\n";
    auto dump = [&](const char* tag, const OpPoly<Complex>& A) {
        for (int o = 0; o < b.size(); ++o)
            for (int l = 0; l < b.size(); ++l)
                for (const auto& [m, c] : A.at(o, l))
                    out << tag << " " << io_detail::slot_str(b.slot(o)) << " " << io_detail::slot_str(b.slot(l))
                        << " | " << io_detail::term_line(m, c) << "\n";
    };
    if (M.linear) dump("lin", *M.linear);
    dump("nl", M.nonlinear);
}

inline PluriMap<Complex> read_plurimap(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("plurimap ", 0) != 0) throw FormatError("not a plurimap file");
    const int J = io_detail::parse_header_int(line, "J"), n = io_detail::parse_header_int(line, "entries");
    const int lin = io_detail::parse_header_int(line, "linear");
    if (J < 1) throw FormatError("bad box");
    Box b{J};
    PluriMap<Complex> M(b);
    if (lin) M.linear = OpPoly<Complex>(b);
    int count = 0;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        const auto parts = io_detail::split_bars(line);
        if (parts.size() != 4) throw FormatError("expected 4 fields: '" + line + "'");
        std::istringstream head(parts[0]);
        std::string tag, row, col;
        if (!(head >> tag >> row >> col)) throw FormatError("bad entry head '" + parts[0] + "'");
        if (tag != "lin" && tag != "nl") throw FormatError("bad tag '" + tag + "'");
        if (tag == "lin" && !lin) throw FormatError("linear entry without linear part");
        const Slot r = io_detail::parse_slot(row), c = io_detail::parse_slot(col);
        if (!b.contains(r.mode) || !b.contains(c.mode)) throw FormatError("slot outside the box");
        const MultiIndex m = io_detail::parse_monomial(parts[2]);
        io_detail::parse_degree(parts[1], m);
        auto& A = tag == "lin" ? *M.linear : M.nonlinear;
        auto& P = A.at(b.id(r), b.id(c));
        if (P.coeff(m) != Complex(0.0)) throw FormatError("repeated entry");
        P.add(m, io_detail::parse_complex(parts[3]));
        ++count;
    }
    if (count != n) throw FormatError("entry count mismatch");
    return M;
}

template <class T, class W>
void save(const std::filesystem::path& path, const T& obj, W writer) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    writer(out, obj);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline void save_hamiltonian(const std::filesystem::path& p, const PolyHamiltonian& H) {
    save(p, H, [](std::ostream& o, const PolyHamiltonian& h) { write_hamiltonian(o, h); });
}
inline void save_plurimap(const std::filesystem::path& p, const PluriMap<Complex>& M) {
    save(p, M, [](std::ostream& o, const PluriMap<Complex>& m) { write_plurimap(o, m); });
}

inline PolyHamiltonian load_hamiltonian(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    return read_hamiltonian(in);
}
inline PluriMap<Complex> load_plurimap(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    return read_plurimap(in);
}

// Trajectory CSV, one row per sample:
//   t, H, momentum, J_1..J_J, then re/im of z_j for j = -J..-1, 1..J
inline std::string trajectory_header(const Box& b) {
    std::string h = "t,H,momentum";
    for (int n = 1; n <= b.J; ++n) h += ",J_" + std::to_string(n);
    for (int j : b.mode_list()) h += ",re_z_" + std::to_string(j) + ",im_z_" + std::to_string(j);
    return h;
}

inline void write_trajectory_csv(std::ostream& out, const Box& b, const TrajectoryLog& log) {
    using io_detail::fmt;
    out << trajectory_header(b) << "\n";
    for (size_t k = 0; k < log.size(); ++k) {
        out << fmt(log.t[k]) << "," << fmt(log.H[k]) << "," << fmt(log.momentum[k]);
        for (double J : log.J[k]) out << "," << fmt(J);
        for (const auto& z : log.z[k]) out << "," << fmt(z.real()) << "," << fmt(z.imag());
        out << "\n";
    }
}

inline nlohmann::json manifest(const std::string& command, const RunConfig& c) {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = canonical(c);
    j["config_digest"] = config_digest(c);
    return j;
}

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << j.dump(2) << "\n";
}

}  // namespace bnf
