#include "phonon/data.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "phonon/errors.hpp"
#include "phonon/inverse.hpp"
#include "phonon/parallel.hpp"

namespace phonon {

ExperimentBank make_bank(const PhaseGrid& grid, const std::vector<std::size_t>& phi_omega_index,
                         const std::vector<std::size_t>& psi_level) {
    if (phi_omega_index.empty() || psi_level.empty()) throw ConfigError("experiment bank needs I >= 1 and J >= 1");
    ExperimentBank bank;
    for (std::size_t m : phi_omega_index) {
        if (m >= grid.nomega()) throw ConfigError("experiment bank: omega index beyond the grid");
        bank.phis.push_back(BoundarySource::kronecker(grid, m));
    }
    for (std::size_t n : psi_level) {
        if (n > grid.nt()) throw ConfigError("experiment bank: measurement level beyond t_max");
        bank.psis.push_back(MeasurementFunctional::kronecker_level(grid, n));
    }
    bank.phi_omega_index = phi_omega_index;
    bank.psi_level = psi_level;
    return bank;
}

ExperimentBank make_default_bank(const PhaseGrid& grid, std::size_t I, std::size_t J,
                                       std::pair<double, double> window, std::uint64_t seed) {
    if (I == 0 || J == 0) throw ConfigError("experiment bank needs I >= 1 and J >= 1");
    if (I > grid.nomega()) {
        std::ostringstream msg;
        msg << "experiment.I = " << I << " exceeds the " << grid.nomega() << " omega nodes";
        throw ConfigError(msg.str());
    }
    std::vector<std::size_t> phi_idx(I);
    for (std::size_t i = 0; i < I; ++i) phi_idx[i] = i;

    std::vector<std::size_t> levels;
    if (J == 1) {
        levels.push_back(grid.nt());
    } else {
        std::vector<std::size_t> pool;
        const double tol = 1e-9 * grid.dt();
        for (std::size_t n = 0; n <= grid.nt(); ++n) {
            const double t = grid.t(n);
            if (t >= window.first - tol && t <= window.second + tol) pool.push_back(n);
        }
        if (pool.size() < J) {
            std::ostringstream msg;
            msg << "experiment.J = " << J << " distinct measurement times requested but the window [" << window.first
                << ", " << window.second << "] holds only " << pool.size() << " time levels";
            throw ConfigError(msg.str());
        }
        std::mt19937_64 rng(seed);
        for (std::size_t j = 0; j < J; ++j) {
            const std::size_t pick = j + draw_index(rng, pool.size() - j);
            std::swap(pool[j], pool[pick]);
        }
        levels.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(J));
        std::sort(levels.begin(), levels.end());
    }
    return make_bank(grid, phi_idx, levels);
}

double uniform_pm1(std::mt19937_64& rng) {
    const double u01 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return 2.0 * u01 - 1.0;
}

Dataset generate_dataset(const PhaseGrid& grid, const MaxwellianTable& table, const ExperimentBank& bank,
                         const ReflectionCoeff& eta_truth, const NoiseDescriptor& noise, std::size_t jobs) {
    if (!(noise.level >= 0.0)) throw ConfigError("noise level must be >= 0");
    Dataset data;
    data.I = bank.I();
    data.J = bank.J();
    data.noise = noise;
    data.phi_omega_index = bank.phi_omega_index;
    data.psi_level = bank.psi_level;
    data.truth_eta.assign(eta_truth.values().begin(), eta_truth.values().end());
    data.values = all_measurements(grid, table, eta_truth, bank, jobs);
    if (noise.level > 0.0) {
        std::mt19937_64 rng(noise.seed);
        for (double& d : data.values) {
            const double u = uniform_pm1(rng);
            d = noise.model == NoiseModel::multiplicative ? d * (1.0 + noise.level * u) : d + noise.level * u;
        }
    }
    return data;
}

const char* to_string(NoiseModel model) {
    return model == NoiseModel::multiplicative ? "multiplicative" : "additive";
}

NoiseModel noise_model_from_string(const std::string& name) {
    if (name == "multiplicative") return NoiseModel::multiplicative;
    if (name == "additive") return NoiseModel::additive;
    throw ConfigError("unknown noise model '" + name + "' (expected multiplicative or additive)");
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
std::string join(const std::vector<T>& v) {
    std::ostringstream os;
    for (std::size_t q = 0; q < v.size(); ++q) {
        if (q) os << ';';
        if constexpr (std::is_floating_point_v<T>) {
            os << fmt17(v[q]);
        } else {
            os << v[q];
        }
    }
    return os.str();
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    std::ostringstream msg;
    msg << "dataset line " << line << ": " << what;
    throw ParseError(msg.str());
}

double parse_double(const std::string& s, std::size_t line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        fail(line, "malformed number '" + s + "'");
    }
    if (used != s.size()) fail(line, "malformed number '" + s + "'");
    return v;
}

std::uint64_t parse_uint(const std::string& s, std::size_t line) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        fail(line, "expected a non-negative integer, got '" + s + "'");
    }
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        fail(line, "integer out of range '" + s + "'");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);
    return parts;
}

}  // namespace

std::string serialize_dataset(const Dataset& data) {
    std::ostringstream os;
    os << "# schema=1\n";
    os << "# I=" << data.I << "\n";
    os << "# J=" << data.J << "\n";
    os << "# noise=" << fmt17(data.noise.level) << "\n";
    os << "# noise_model=" << to_string(data.noise.model) << "\n";
    os << "# seed=" << data.noise.seed << "\n";
    if (!data.phi_omega_index.empty()) os << "# phi_omega_index=" << join(data.phi_omega_index) << "\n";
    if (!data.psi_level.empty()) os << "# psi_level=" << join(data.psi_level) << "\n";
    if (!data.truth_eta.empty()) os << "# truth_eta=" << join(data.truth_eta) << "\n";
    os << "i,j,d\n";
    for (std::size_t i = 0; i < data.I; ++i)
        for (std::size_t j = 0; j < data.J; ++j) os << (i + 1) << ',' << (j + 1) << ',' << fmt17(data.at(i, j)) << "\n";
    return os.str();
}

Dataset parse_dataset(const std::string& text) {
    Dataset data;
    std::map<std::string, std::string> header;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    bool saw_columns = false;
    std::size_t rows = 0;
    bool have_I = false;
    bool have_J = false;

    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("#", 0) == 0) {
            if (saw_columns) fail(lineno, "header line after data rows");
            const auto body = line.substr(line.find_first_not_of("# "));
            const auto eq = body.find('=');
            if (eq == std::string::npos) fail(lineno, "header line without '='");
            const std::string key = body.substr(0, eq);
            const std::string value = body.substr(eq + 1);
            if (key == "schema") {
                if (value != "1") fail(lineno, "unsupported schema version '" + value + "' (expected 1)");
            } else if (key == "I") {
                data.I = parse_uint(value, lineno);
                have_I = true;
            } else if (key == "J") {
                data.J = parse_uint(value, lineno);
                have_J = true;
            } else if (key == "noise") {
                data.noise.level = parse_double(value, lineno);
            } else if (key == "noise_model") {
                try {
                    data.noise.model = noise_model_from_string(value);
                } catch (const ConfigError& e) {
                    fail(lineno, e.what());
                }
            } else if (key == "seed") {
                data.noise.seed = parse_uint(value, lineno);
            } else if (key == "phi_omega_index") {
                for (const auto& p : split(value, ';')) data.phi_omega_index.push_back(parse_uint(p, lineno));
            } else if (key == "psi_level") {
                for (const auto& p : split(value, ';')) data.psi_level.push_back(parse_uint(p, lineno));
            } else if (key == "truth_eta") {
                for (const auto& p : split(value, ';')) data.truth_eta.push_back(parse_double(p, lineno));
            } else {
                fail(lineno, "unknown header key '" + key + "'");
            }
            header[key] = value;
            continue;
        }
        if (!saw_columns) {
            if (line != "i,j,d") fail(lineno, "expected column header 'i,j,d'");
            if (!header.count("schema")) fail(lineno, "missing '# schema=' header");
            if (!have_I || !have_J) fail(lineno, "missing '# I=' or '# J=' header");
            if (data.I == 0 || data.J == 0) fail(lineno, "I and J must be positive");
            data.values.reserve(data.I * data.J);
            saw_columns = true;
            continue;
        }
        const auto cols = split(line, ',');
        if (cols.size() != 3) fail(lineno, "expected 3 comma-separated fields");
        if (rows >= data.I * data.J) {
            std::ostringstream msg;
            msg << "more rows than I*J = " << data.I * data.J;
            fail(lineno, msg.str());
        }
        const std::size_t i = parse_uint(cols[0], lineno);
        const std::size_t j = parse_uint(cols[1], lineno);
        const std::size_t want_i = rows / data.J + 1;
        const std::size_t want_j = rows % data.J + 1;
        if (i != want_i || j != want_j) {
            std::ostringstream msg;
            msg << "expected row (" << want_i << "," << want_j << ") in row-major order, got (" << i << "," << j << ")";
            fail(lineno, msg.str());
        }
        const double d = parse_double(cols[2], lineno);
        if (!std::isfinite(d)) fail(lineno, "non-finite datum");
        data.values.push_back(d);
        ++rows;
    }
    if (!saw_columns) fail(lineno + 1, "file ended before the 'i,j,d' column header");
    if (rows != data.I * data.J) {
        std::ostringstream msg;
        msg << "file ended after " << rows << " rows, header promises I*J = " << data.I * data.J;
        fail(lineno + 1, msg.str());
    }
    if (!data.phi_omega_index.empty() && data.phi_omega_index.size() != data.I) {
        throw ParseError("dataset: phi_omega_index length does not match I");
    }
    if (!data.psi_level.empty() && data.psi_level.size() != data.J) {
        throw ParseError("dataset: psi_level length does not match J");
    }
    return data;
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << serialize_dataset(data);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open dataset " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dataset(buf.str());
}

std::string dataset_hash(const Dataset& data) {
    const std::string text = serialize_dataset(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

}  // namespace phonon
