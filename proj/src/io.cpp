#include "pentomo/io.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace pentomo {

using nlohmann::json;

void TomographyConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("config field '" + field + "': " + why);
    };
    if (c1 < 0.0 || c2_mod < 0.0) fail("state.c1/state.c2", "must be >= 0");
    if (std::abs(c1 * c1 + c2_mod * c2_mod - 1.0) > 1e-9) {
        fail("state.c1/state.c2", "c1^2 + c2^2 must equal 1");
    }
    if (nc < 0) fail("nc", "must be >= 0");
    if (n_meas < nc) fail("n_meas", "must be >= nc");
    if (alpha_mod < 0.0) fail("alpha_mod", "must be >= 0");
    if (phases < 2 * nc + 1) fail("phases", "need at least 2 nc + 1 uniform phases");
    if (!(eta > 0.0) || eta > 1.0) fail("eta", "must be in (0, 1]");
    if (events_per_phase < 1) fail("events_per_phase", "must be >= 1");
    if (!(cond_limit > 0.0)) fail("cond_limit", "must be > 0");
    if (threads < 0) fail("threads", "must be >= 0");
    if (output_dir.empty()) fail("output_dir", "must not be empty");
}

std::vector<double> RecordSet::phase_grid() const {
    std::vector<double> phis;
    if (exact) {
        for (const auto& r : analytic_phase_records) phis.push_back(r.phi);
    } else {
        for (const auto& r : phase_records) phis.push_back(r.phi);
    }
    return phis;
}

namespace io {

namespace {

std::string fmt_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

json config_to_json_obj(const TomographyConfig& c) {
    json j;
    j["state"] = {{"c1", c.c1}, {"c2", c.c2_mod}, {"theta", c.theta},
                  {"gamma", c.gamma}, {"xi", c.xi}};
    j["nc"] = c.nc;
    j["n_meas"] = c.n_meas;
    j["alpha_mod"] = c.alpha_mod;
    j["phases"] = c.phases;
    j["eta"] = c.eta;
    j["events_per_phase"] = c.events_per_phase;
    j["seed"] = c.seed;
    j["exact_mode"] = c.exact_mode;
    j["psd_projection"] = c.psd_projection;
    j["cond_limit"] = c.cond_limit;
    j["threads"] = c.threads;
    j["output_dir"] = c.output_dir;
    j["spin_pulses"] = json::array();
    for (const auto& p : c.spin_pulses) {
        j["spin_pulses"].push_back({{"chi", p.chi}, {"phi_d", p.phi_d}});
    }
    j["tolerances"] = {{"rho_max_abs", c.tolerances.rho_max_abs},
                       {"rho12_imag_max", c.tolerances.rho12_imag_max},
                       {"c_rel", c.tolerances.c_rel},
                       {"theta_abs", c.tolerances.theta_abs}};
    return j;
}

TomographyConfig config_from_json_obj(const json& j) {
    TomographyConfig c;
    if (j.contains("state")) {
        const auto& s = j.at("state");
        c.c1 = s.value("c1", c.c1);
        c.c2_mod = s.value("c2", c.c2_mod);
        c.theta = s.value("theta", c.theta);
        c.gamma = s.value("gamma", c.gamma);
        c.xi = s.value("xi", c.xi);
    }
    c.nc = j.value("nc", c.nc);
    c.n_meas = j.value("n_meas", c.n_meas);
    c.alpha_mod = j.value("alpha_mod", c.alpha_mod);
    c.phases = j.value("phases", 2 * c.nc + 2);
    c.eta = j.value("eta", c.eta);
    c.events_per_phase = j.value("events_per_phase", c.events_per_phase);
    c.seed = j.value("seed", c.seed);
    c.exact_mode = j.value("exact_mode", c.exact_mode);
    c.psd_projection = j.value("psd_projection", c.psd_projection);
    c.cond_limit = j.value("cond_limit", c.cond_limit);
    c.threads = j.value("threads", c.threads);
    c.output_dir = j.value("output_dir", c.output_dir);
    if (j.contains("spin_pulses")) {
        c.spin_pulses.clear();
        for (const auto& p : j.at("spin_pulses")) {
            c.spin_pulses.push_back({p.at("chi").get<double>(), p.at("phi_d").get<double>()});
        }
    }
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        c.tolerances.rho_max_abs = t.value("rho_max_abs", c.tolerances.rho_max_abs);
        c.tolerances.rho12_imag_max = t.value("rho12_imag_max", c.tolerances.rho12_imag_max);
        c.tolerances.c_rel = t.value("c_rel", c.tolerances.c_rel);
        c.tolerances.theta_abs = t.value("theta_abs", c.tolerances.theta_abs);
    }
    return c;
}

json matrix_to_json(const Eigen::MatrixXcd& m) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json rrow = json::array(), irow = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            rrow.push_back(m(i, j).real());
            irow.push_back(m(i, j).imag());
        }
        re.push_back(std::move(rrow));
        im.push_back(std::move(irow));
    }
    return {{"re", std::move(re)}, {"im", std::move(im)}};
}

Eigen::MatrixXcd matrix_from_json(const json& j) {
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    const auto rows = re.size();
    const auto cols = rows > 0 ? re.at(0).size() : 0;
    Eigen::MatrixXcd m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t k = 0; k < cols; ++k) {
            m(i, k) = Complex(re.at(i).at(k).get<double>(), im.at(i).at(k).get<double>());
        }
    }
    return m;
}

json vector_to_json(const Eigen::VectorXcd& v) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        re.push_back(v(i).real());
        im.push_back(v(i).imag());
    }
    return {{"re", std::move(re)}, {"im", std::move(im)}};
}

Eigen::VectorXcd vector_from_json(const json& j) {
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    Eigen::VectorXcd v(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) {
        v(i) = Complex(re.at(i).get<double>(), im.at(i).get<double>());
    }
    return v;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string phase_file_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "phase_%04d.csv", index);
    return buf;
}

std::string pulse_file_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "pulse_%02d.csv", index);
    return buf;
}

}  // namespace

TomographyConfig load_config(const std::filesystem::path& path) {
    return config_from_json(read_file(path));
}

std::string config_to_json(const TomographyConfig& cfg) {
    return config_to_json_obj(cfg).dump(2) + "\n";
}

TomographyConfig config_from_json(const std::string& text) {
    return config_from_json_obj(json::parse(text));
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out.good()) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

namespace {

template <typename Rec, typename Value>
std::string record_csv(const Rec& rec, const char* value_name,
                       const std::function<Value(int, int)>& cell) {
    std::ostringstream os;
    os << "phase_index,phase,spin,k," << value_name << "\n";
    for (int b = 0; b < 2; ++b) {
        const char* spin = b == 0 ? "up" : "down";
        for (int k = 0; k <= rec.k_max(); ++k) {
            os << rec.phase_index << ',' << fmt_double(rec.phi) << ',' << spin << ','
               << k << ',';
            if constexpr (std::is_same_v<Value, double>) {
                os << fmt_double(cell(b, k));
            } else {
                os << cell(b, k);
            }
            os << '\n';
        }
    }
    return os.str();
}

struct CsvRow {
    int phase_index;
    double phi;
    int spin;
    int k;
    std::string value;
};

std::pair<std::string, std::vector<CsvRow>> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("record csv: empty file");
    std::string header = line;
    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        CsvRow row;
        std::getline(ls, tok, ',');
        row.phase_index = std::stoi(tok);
        std::getline(ls, tok, ',');
        row.phi = std::stod(tok);
        std::getline(ls, tok, ',');
        if (tok == "up") row.spin = 0;
        else if (tok == "down") row.spin = 1;
        else throw std::runtime_error("record csv: bad spin label '" + tok + "'");
        std::getline(ls, tok, ',');
        row.k = std::stoi(tok);
        std::getline(ls, row.value, ',');
        rows.push_back(row);
    }
    return {header, rows};
}

}  // namespace

std::string record_to_csv(const MeasurementRecord& rec) {
    return record_csv<MeasurementRecord, std::int64_t>(
        rec, "count", [&rec](int b, int k) { return rec.counts(b, k); });
}

std::string record_to_csv(const AnalyticRecord& rec) {
    return record_csv<AnalyticRecord, double>(
        rec, "weight", [&rec](int b, int k) { return rec.weights(b, k); });
}

MeasurementRecord record_from_csv(const std::string& text) {
    auto [header, rows] = parse_csv(text);
    if (header != "phase_index,phase,spin,k,count") {
        throw std::runtime_error("record csv: expected count header, got '" + header + "'");
    }
    if (rows.empty()) throw std::runtime_error("record csv: no rows");
    int k_max = 0;
    for (const auto& r : rows) k_max = std::max(k_max, r.k);
    MeasurementRecord rec;
    rec.phase_index = rows.front().phase_index;
    rec.phi = rows.front().phi;
    rec.counts = Eigen::Matrix<std::int64_t, 2, Eigen::Dynamic>::Zero(2, k_max + 1);
    for (const auto& r : rows) {
        rec.counts(r.spin, r.k) = std::stoll(r.value);
    }
    rec.total_events = rec.counts.sum();
    return rec;
}

AnalyticRecord analytic_record_from_csv(const std::string& text) {
    auto [header, rows] = parse_csv(text);
    if (header != "phase_index,phase,spin,k,weight") {
        throw std::runtime_error("record csv: expected weight header, got '" + header + "'");
    }
    if (rows.empty()) throw std::runtime_error("record csv: no rows");
    int k_max = 0;
    for (const auto& r : rows) k_max = std::max(k_max, r.k);
    AnalyticRecord rec;
    rec.phase_index = rows.front().phase_index;
    rec.phi = rows.front().phi;
    rec.weights = Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, k_max + 1);
    for (const auto& r : rows) {
        rec.weights(r.spin, r.k) = std::stod(r.value);
    }
    return rec;
}

void write_record_set(const std::filesystem::path& dir, const RecordSet& set) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    // the records' location is wherever they sit; keeping the resolved
    // output_dir inside the sidecar would make otherwise identical runs
    // byte-differ
    TomographyConfig stored = set.config;
    stored.output_dir = ".";

    json sidecar;
    sidecar["config"] = config_to_json_obj(stored);
    sidecar["mode"] = set.exact ? "weights" : "counts";
    sidecar["n_samp"] = set.n_samp;
    sidecar["rng"] = {{"seed", set.config.seed}, {"scheme", "per-phase-splitmix-v1"}};
    sidecar["phases"] = json::array();
    sidecar["pulses"] = json::array();

    auto add_phase = [&sidecar](int index, double phi, const std::string& file) {
        sidecar["phases"].push_back({{"index", index}, {"phi", phi}, {"file", file}});
    };
    auto add_pulse = [&sidecar](int index, const SpinRotation& p, const std::string& file) {
        sidecar["pulses"].push_back(
            {{"index", index}, {"chi", p.chi}, {"phi_d", p.phi_d}, {"file", file}});
    };

    if (set.exact) {
        for (std::size_t i = 0; i < set.analytic_phase_records.size(); ++i) {
            const auto& r = set.analytic_phase_records[i];
            const std::string file = phase_file_name(r.phase_index);
            atomic_write(dir / file, record_to_csv(r));
            add_phase(r.phase_index, r.phi, file);
        }
        for (std::size_t i = 0; i < set.analytic_pulse_records.size(); ++i) {
            const auto& r = set.analytic_pulse_records[i];
            const std::string file = pulse_file_name(static_cast<int>(i));
            atomic_write(dir / file, record_to_csv(r));
            add_pulse(static_cast<int>(i), *r.pulse, file);
        }
    } else {
        for (std::size_t i = 0; i < set.phase_records.size(); ++i) {
            const auto& r = set.phase_records[i];
            const std::string file = phase_file_name(r.phase_index);
            atomic_write(dir / file, record_to_csv(r));
            add_phase(r.phase_index, r.phi, file);
        }
        for (std::size_t i = 0; i < set.pulse_records.size(); ++i) {
            const auto& r = set.pulse_records[i];
            const std::string file = pulse_file_name(static_cast<int>(i));
            atomic_write(dir / file, record_to_csv(r));
            add_pulse(static_cast<int>(i), *r.pulse, file);
        }
    }
    atomic_write(dir / "sidecar.json", sidecar.dump(2) + "\n");
}

RecordSet read_record_set(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    const fs::path sidecar_path = dir / "sidecar.json";
    if (!fs::exists(sidecar_path)) {
        throw std::runtime_error("records directory has no sidecar.json: " + dir.string());
    }
    const json sidecar = json::parse(read_file(sidecar_path));
    RecordSet set;
    set.config = config_from_json_obj(sidecar.at("config"));
    set.exact = sidecar.at("mode").get<std::string>() == "weights";
    set.n_samp = sidecar.value("n_samp", set.config.n_meas);

    for (const auto& ph : sidecar.at("phases")) {
        const fs::path file = dir / ph.at("file").get<std::string>();
        if (!fs::exists(file)) {
            throw std::runtime_error("missing phase record for index "
                                     + std::to_string(ph.at("index").get<int>()) + ": "
                                     + file.string());
        }
        const std::string text = read_file(file);
        const double phi = ph.at("phi").get<double>();
        if (set.exact) {
            auto rec = analytic_record_from_csv(text);
            rec.alpha_mod = set.config.alpha_mod;
            rec.eta = set.config.eta;
            if (rec.phase_index != ph.at("index").get<int>() || std::abs(rec.phi - phi) > 1e-12) {
                throw std::runtime_error("sidecar mismatch for " + file.string());
            }
            set.analytic_phase_records.push_back(std::move(rec));
        } else {
            auto rec = record_from_csv(text);
            rec.alpha_mod = set.config.alpha_mod;
            rec.eta = set.config.eta;
            if (rec.phase_index != ph.at("index").get<int>() || std::abs(rec.phi - phi) > 1e-12) {
                throw std::runtime_error("sidecar mismatch for " + file.string());
            }
            set.phase_records.push_back(std::move(rec));
        }
    }
    if (static_cast<int>(set.exact ? set.analytic_phase_records.size()
                                   : set.phase_records.size()) != set.config.phases) {
        throw std::runtime_error("incomplete record set: expected "
                                 + std::to_string(set.config.phases) + " phases");
    }

    for (const auto& pl : sidecar.at("pulses")) {
        const fs::path file = dir / pl.at("file").get<std::string>();
        if (!fs::exists(file)) {
            throw std::runtime_error("missing pulse record: " + file.string());
        }
        const SpinRotation rot{pl.at("chi").get<double>(), pl.at("phi_d").get<double>()};
        const std::string text = read_file(file);
        if (set.exact) {
            auto rec = analytic_record_from_csv(text);
            rec.eta = set.config.eta;
            rec.pulse = rot;
            set.analytic_pulse_records.push_back(std::move(rec));
        } else {
            auto rec = record_from_csv(text);
            rec.eta = set.config.eta;
            rec.pulse = rot;
            set.pulse_records.push_back(std::move(rec));
        }
    }
    return set;
}

std::string report_to_json(const ReconstructionReport& r) {
    json j;
    j["nc"] = r.nc;
    j["alpha_mod"] = r.alpha_mod;
    j["eta"] = r.eta;
    j["rho11"] = matrix_to_json(r.rho11.entries);
    j["rho22"] = matrix_to_json(r.rho22.entries);
    j["rho12"] = matrix_to_json(r.rho12.entries);
    j["psi1"] = vector_to_json(r.psi1.amplitudes);
    j["psi2"] = vector_to_json(r.psi2.amplitudes);
    j["estimates"] = {{"c1", r.c1_est},
                      {"c2", r.c2_est},
                      {"theta", r.theta_est},
                      {"overlap_r", r.overlap_r},
                      {"overlap_beta", r.overlap_beta},
                      {"p_up", r.p_up}};
    j["pbar"] = json::array();
    for (const auto& p : r.pbar) {
        j["pbar"].push_back({{"chi", p.chi}, {"phi_d", p.phi_d}, {"pbar_up", p.pbar_up}});
    }
    auto bands = [](const std::vector<BandDiagnostics>& list) {
        json arr = json::array();
        for (const auto& b : list) {
            arr.push_back({{"s", b.s}, {"cond_gtg", b.cond_gtg}, {"residual", b.residual}});
        }
        return arr;
    };
    j["diagnostics"] = {{"bands_up", bands(r.bands_up)},
                        {"bands_down", bands(r.bands_down)},
                        {"imag_diag_max", r.imag_diag_max},
                        {"purity_second_eigenvalue",
                         {{"rho11", r.purity_second_eig_11}, {"rho22", r.purity_second_eig_22}}},
                        {"overlap_ill_conditioned", r.overlap_ill_conditioned},
                        {"psd_projected", r.psd_projected},
                        {"spin_recovery_error", r.spin_recovery_error}};
    return j.dump(2) + "\n";
}

ReconstructionReport report_from_json(const std::string& text) {
    const json j = json::parse(text);
    ReconstructionReport r;
    r.nc = j.at("nc").get<int>();
    r.alpha_mod = j.at("alpha_mod").get<double>();
    r.eta = j.at("eta").get<double>();
    r.rho11.entries = matrix_from_json(j.at("rho11"));
    r.rho22.entries = matrix_from_json(j.at("rho22"));
    r.rho12.entries = matrix_from_json(j.at("rho12"));
    r.psi1 = make_fock_vector(vector_from_json(j.at("psi1")));
    r.psi2 = make_fock_vector(vector_from_json(j.at("psi2")));
    const auto& e = j.at("estimates");
    r.c1_est = e.at("c1").get<double>();
    r.c2_est = e.at("c2").get<double>();
    r.theta_est = e.at("theta").is_number() ? e.at("theta").get<double>()
                                            : std::numeric_limits<double>::quiet_NaN();
    r.overlap_r = e.at("overlap_r").get<double>();
    r.overlap_beta = e.at("overlap_beta").get<double>();
    r.p_up = e.at("p_up").get<double>();
    for (const auto& p : j.at("pbar")) {
        r.pbar.push_back({p.at("chi").get<double>(), p.at("phi_d").get<double>(),
                          p.at("pbar_up").get<double>()});
    }
    const auto& d = j.at("diagnostics");
    auto bands = [](const json& arr) {
        std::vector<BandDiagnostics> list;
        for (const auto& b : arr) {
            list.push_back({b.at("s").get<int>(), b.at("cond_gtg").get<double>(),
                            b.at("residual").get<double>()});
        }
        return list;
    };
    r.bands_up = bands(d.at("bands_up"));
    r.bands_down = bands(d.at("bands_down"));
    r.imag_diag_max = d.at("imag_diag_max").get<double>();
    r.purity_second_eig_11 = d.at("purity_second_eigenvalue").at("rho11").get<double>();
    r.purity_second_eig_22 = d.at("purity_second_eigenvalue").at("rho22").get<double>();
    r.overlap_ill_conditioned = d.at("overlap_ill_conditioned").get<bool>();
    r.psd_projected = d.at("psd_projected").get<bool>();
    r.spin_recovery_error = d.value("spin_recovery_error", std::string());
    return r;
}

}  // namespace io
}  // namespace pentomo
