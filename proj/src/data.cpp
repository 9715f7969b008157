#include "dropgp/data.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dropgp/gp.hpp"

namespace dropgp {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("malformed CSV value '" + s + "' at line " +
                                 std::to_string(line_no));
    }
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace

LoadedData load_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open data file: " + path);

    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("empty data file: " + path);
    const std::vector<std::string> header = split(trim(line), ',');

    LoadedData out;
    std::vector<std::size_t> feature_cols, target_cols;
    std::ptrdiff_t label_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = trim(header[i]);
        if (name == "label") {
            label_col = static_cast<std::ptrdiff_t>(i);
        } else if (name.rfind("y_", 0) == 0) {
            target_cols.push_back(i);
            out.target_names.push_back(name);
        } else {
            feature_cols.push_back(i);
            out.feature_names.push_back(name);
        }
    }
    if (label_col >= 0 && !target_cols.empty())
        throw std::runtime_error("data file mixes label and y_* columns: " + path);

    std::vector<Vec> rows;
    std::vector<Vec> target_rows;
    std::vector<std::size_t> labels;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        const std::vector<std::string> fields = split(t, ',');
        if (fields.size() != header.size())
            throw std::runtime_error("malformed CSV row (field count) at line " +
                                     std::to_string(line_no));
        Vec x;
        for (std::size_t c : feature_cols) x.push_back(parse_double(fields[c], line_no));
        rows.push_back(std::move(x));
        if (label_col >= 0) {
            const double v = parse_double(fields[static_cast<std::size_t>(label_col)], line_no);
            if (v < 1.0 || v != std::floor(v))
                throw std::runtime_error("invalid class label at line " +
                                         std::to_string(line_no));
            labels.push_back(static_cast<std::size_t>(v));
        } else if (!target_cols.empty()) {
            Vec y;
            for (std::size_t c : target_cols) y.push_back(parse_double(fields[c], line_no));
            target_rows.push_back(std::move(y));
        }
    }
    if (rows.empty()) throw std::runtime_error("data file has no rows: " + path);

    out.data.inputs = Matrix::from_rows(rows);
    if (label_col >= 0) {
        out.data.classification = true;
        out.data.labels = std::move(labels);
        out.has_targets = true;
    } else if (!target_cols.empty()) {
        out.data.targets = Matrix::from_rows(target_rows);
        out.has_targets = true;
    }
    return out;
}

void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    if (!header.empty()) {
        for (std::size_t i = 0; i < header.size(); ++i)
            os << (i ? "," : "") << header[i];
        os << "\n";
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j)
            os << (j ? "," : "") << fmt(m(i, j));
        os << "\n";
    }
}

void RunConfig::validate() const {
    if (widths.size() < 3)
        throw std::runtime_error("config: widths needs at least one hidden layer");
    if (keep_probs.size() != widths.size() - 1)
        throw std::runtime_error("config: keep_probs must have one entry per weight layer");
    if ((tau > 0.0) == (lambda1 > 0.0))
        throw std::runtime_error("config: give exactly one of tau / lambda1");
    if (lengthscale <= 0.0 || lengthscale_out <= 0.0)
        throw std::runtime_error("config: length-scales must be > 0");
    if (schedule.iterations == 0 && schedule.base_lr != 0.0) {
        // zero iterations is allowed (checkpoint equals initialisation)
    }
    if (predict_samples < 1) throw std::runtime_error("config: samples must be >= 1");
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: expected key=value at line " +
                                     std::to_string(line_no));
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));

        auto as_list = [&](auto push) {
            for (const std::string& f : split(val, ','))
                push(trim(f));
        };

        if (key == "widths") {
            cfg.widths.clear();
            as_list([&](const std::string& f) {
                cfg.widths.push_back(static_cast<std::size_t>(std::stoul(f)));
            });
        } else if (key == "keep_probs") {
            cfg.keep_probs.clear();
            as_list([&](const std::string& f) { cfg.keep_probs.push_back(std::stod(f)); });
        } else if (key == "nonlinearity") {
            cfg.nonlinearity = nonlinearity_from_string(val);
        } else if (key == "scale_features") {
            cfg.scale_features = val == "1" || val == "true";
        } else if (key == "output_bias") {
            cfg.output_bias = val == "1" || val == "true";
        } else if (key == "task") {
            if (val == "regression") cfg.classification = false;
            else if (val == "classification") cfg.classification = true;
            else throw std::runtime_error("config: unknown task " + val);
        } else if (key == "tau") {
            cfg.tau = std::stod(val);
        } else if (key == "lambda1") {
            cfg.lambda1 = std::stod(val);
        } else if (key == "lengthscale") {
            cfg.lengthscale = std::stod(val);
        } else if (key == "lengthscale_out") {
            cfg.lengthscale_out = std::stod(val);
        } else if (key == "base_lr") {
            cfg.schedule.base_lr = std::stod(val);
        } else if (key == "gamma") {
            cfg.schedule.gamma = std::stod(val);
        } else if (key == "power") {
            cfg.schedule.power = std::stod(val);
        } else if (key == "momentum") {
            cfg.schedule.momentum = std::stod(val);
        } else if (key == "iterations") {
            cfg.schedule.iterations = static_cast<std::size_t>(std::stoul(val));
        } else if (key == "batch_size") {
            cfg.schedule.batch_size = static_cast<std::size_t>(std::stoul(val));
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(std::stoull(val));
        } else if (key == "samples") {
            cfg.predict_samples = static_cast<std::size_t>(std::stoul(val));
        } else {
            throw std::runtime_error("config: unknown key '" + key + "' at line " +
                                     std::to_string(line_no));
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "task = " << (cfg.classification ? "classification" : "regression") << "\n";
    os << "widths = ";
    for (std::size_t i = 0; i < cfg.widths.size(); ++i)
        os << (i ? "," : "") << cfg.widths[i];
    os << "\nnonlinearity = " << to_string(cfg.nonlinearity) << "\n";
    os << "scale_features = " << (cfg.scale_features ? 1 : 0) << "\n";
    os << "output_bias = " << (cfg.output_bias ? 1 : 0) << "\n";
    os << "keep_probs = ";
    for (std::size_t i = 0; i < cfg.keep_probs.size(); ++i)
        os << (i ? "," : "") << fmt(cfg.keep_probs[i]);
    os << "\n";
    if (cfg.tau > 0.0) os << "tau = " << fmt(cfg.tau) << "\n";
    if (cfg.lambda1 > 0.0) os << "lambda1 = " << fmt(cfg.lambda1) << "\n";
    os << "lengthscale = " << fmt(cfg.lengthscale) << "\n";
    os << "lengthscale_out = " << fmt(cfg.lengthscale_out) << "\n";
    os << "base_lr = " << fmt(cfg.schedule.base_lr) << "\n";
    os << "gamma = " << fmt(cfg.schedule.gamma) << "\n";
    os << "power = " << fmt(cfg.schedule.power) << "\n";
    os << "momentum = " << fmt(cfg.schedule.momentum) << "\n";
    os << "iterations = " << cfg.schedule.iterations << "\n";
    os << "batch_size = " << cfg.schedule.batch_size << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "samples = " << cfg.predict_samples << "\n";
    return os.str();
}

ResolvedHyper resolve_hyper(const RunConfig& cfg, std::size_t n) {
    cfg.validate();
    const double p1 = cfg.keep_probs.front();
    double tau = cfg.tau;
    if (tau <= 0.0)
        tau = tau_from_weight_decay(cfg.lengthscale, p1, n, cfg.lambda1);

    HyperParams h;
    h.tau = tau;
    h.lengthscale = cfg.lengthscale;
    h.lengthscale_out = cfg.lengthscale_out;
    const double denom = 2.0 * tau * static_cast<double>(n);
    const std::size_t layers = cfg.widths.size() - 1;
    for (std::size_t i = 0; i < layers; ++i) {
        const double scale = i == 0 ? cfg.lengthscale * cfg.lengthscale : 1.0;
        h.weight_decays.push_back(scale * cfg.keep_probs[i] / denom);
        h.bias_decays.push_back(cfg.lengthscale_out * cfg.lengthscale_out / denom);
    }
    return {h, tau};
}

Dataset make_sine_gap(std::size_t n, double noise, RngState& rng) {
    Dataset d;
    d.inputs = Matrix(n, 1);
    d.targets = Matrix(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.next_uniform();
        // Uniform over [-3,-1] u [1,3]; the gap (-1,1) holds no data.
        const double x = u < 0.5 ? -3.0 + 4.0 * u : 1.0 + 4.0 * (u - 0.5);
        d.inputs(i, 0) = x;
        d.targets(i, 0) = std::sin(2.0 * x) + noise * rng.next_gaussian();
    }
    return d;
}

Dataset make_two_moons(std::size_t n, double noise, RngState& rng) {
    Dataset d;
    d.classification = true;
    d.inputs = Matrix(n, 2);
    d.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool upper = (i % 2) == 0;
        const double theta = M_PI * rng.next_uniform();
        double x, y;
        if (upper) {
            x = std::cos(theta);
            y = std::sin(theta);
        } else {
            x = 1.0 - std::cos(theta);
            y = 0.5 - std::sin(theta);
        }
        d.inputs(i, 0) = x + noise * rng.next_gaussian();
        d.inputs(i, 1) = y + noise * rng.next_gaussian();
        d.labels[i] = upper ? 1 : 2;
    }
    return d;
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    for (std::size_t j = 0; j < data.inputs.cols(); ++j) os << "x" << j << ",";
    if (data.classification) {
        os << "label\n";
    } else {
        for (std::size_t j = 0; j < data.targets.cols(); ++j)
            os << "y_" << j << (j + 1 < data.targets.cols() ? "," : "\n");
    }
    for (std::size_t i = 0; i < data.inputs.rows(); ++i) {
        for (std::size_t j = 0; j < data.inputs.cols(); ++j)
            os << fmt(data.inputs(i, j)) << ",";
        if (data.classification) {
            os << data.labels[i] << "\n";
        } else {
            for (std::size_t j = 0; j < data.targets.cols(); ++j)
                os << fmt(data.targets(i, j)) << (j + 1 < data.targets.cols() ? "," : "\n");
        }
    }
}

} // namespace dropgp
