#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "peellab/errors.hpp"
#include "peellab/step_law.hpp"

namespace peellab {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const char* key) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw CalibrationFailed(std::string("bad numeric field: ") + key);
    return v;
}

} // namespace

std::string StepLaw::serialize() const {
    std::ostringstream os;
    os << "peellab-steplaw v1\n";
    os << "beta " << fmt_double(beta_) << "\n";
    os << "alpha " << fmt_double(alpha_) << "\n";
    os << "p_q " << fmt_double(p_q_) << "\n";
    os << "c_q " << fmt_double(c_q_) << "\n";
    os << "mass_defect " << fmt_double(mass_defect_) << "\n";
    os << "neg_mass " << fmt_double(neg_mass_) << "\n";
    os << "tail_c2 " << fmt_double(tail_c2_) << "\n";
    os << "tail_c3 " << fmt_double(tail_c3_) << "\n";
    os << "tail_c4 " << fmt_double(tail_c4_) << "\n";
    os << "direct_cutoff " << direct_cutoff_ << "\n";
    os << "pos_cutoff " << pos_cutoff() << "\n";
    os << "neg_cutoff " << neg_cutoff() << "\n";
    os << "columns k nu\n";
    for (std::int64_t k = 0; k <= pos_cutoff(); ++k)
        os << k << " " << fmt_double(pos_[static_cast<std::size_t>(k)]) << "\n";
    for (std::int64_t j = 1; j <= neg_cutoff(); ++j)
        os << -j << " " << fmt_double(neg_[static_cast<std::size_t>(j - 1)]) << "\n";
    return os.str();
}

StepLaw StepLaw::deserialize(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "peellab-steplaw v1")
        throw CalibrationFailed("unrecognized step-law file header");

    StepLaw law;
    std::int64_t pos_cut = -1, neg_cut = -1;
    while (std::getline(is, line)) {
        if (line == "columns k nu") break;
        std::istringstream ls(line);
        std::string key, value;
        ls >> key >> value;
        if (key == "beta") law.beta_ = parse_double(value, "beta");
        else if (key == "alpha") law.alpha_ = parse_double(value, "alpha");
        else if (key == "p_q") law.p_q_ = parse_double(value, "p_q");
        else if (key == "c_q") law.c_q_ = parse_double(value, "c_q");
        else if (key == "mass_defect") law.mass_defect_ = parse_double(value, "mass_defect");
        else if (key == "neg_mass") law.neg_mass_ = parse_double(value, "neg_mass");
        else if (key == "tail_c2") law.tail_c2_ = parse_double(value, "tail_c2");
        else if (key == "tail_c3") law.tail_c3_ = parse_double(value, "tail_c3");
        else if (key == "tail_c4") law.tail_c4_ = parse_double(value, "tail_c4");
        else if (key == "direct_cutoff") law.direct_cutoff_ = std::stoll(value);
        else if (key == "pos_cutoff") pos_cut = std::stoll(value);
        else if (key == "neg_cutoff") neg_cut = std::stoll(value);
        else throw CalibrationFailed("unknown step-law header key: " + key);
    }
    if (pos_cut < 0 || neg_cut < 0)
        throw CalibrationFailed("step-law file missing cutoff fields");

    law.pos_.assign(static_cast<std::size_t>(pos_cut) + 1, 0.0);
    law.neg_.assign(static_cast<std::size_t>(neg_cut), 0.0);
    std::int64_t rows = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::int64_t k;
        std::string value;
        ls >> k >> value;
        if (k >= 0) {
            if (k > pos_cut) throw CalibrationFailed("positive row beyond pos_cutoff");
            law.pos_[static_cast<std::size_t>(k)] = parse_double(value, "nu");
        } else {
            if (-k > neg_cut) throw CalibrationFailed("negative row beyond neg_cutoff");
            law.neg_[static_cast<std::size_t>(-k - 1)] = parse_double(value, "nu");
        }
        ++rows;
    }
    if (rows != pos_cut + 1 + neg_cut)
        throw CalibrationFailed("step-law file row count does not match cutoffs");
    return law;
}

void StepLaw::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CalibrationFailed("cannot open step-law file for writing: " + path);
    out << serialize();
}

StepLaw StepLaw::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CalibrationFailed("cannot open step-law file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize(buf.str());
}

std::uint64_t StepLaw::fingerprint() const {
    if (fingerprint_ != 0) return fingerprint_;
    const std::string bytes = serialize();
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    fingerprint_ = hash;
    return hash;
}

std::string StepLaw::fingerprint_hex() const {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, fingerprint());
    return buf;
}

} // namespace peellab
