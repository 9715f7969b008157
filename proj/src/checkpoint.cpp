#include "dropgp/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dropgp {

namespace {

constexpr const char* kMagic = "dropgp-checkpoint";
constexpr int kVersion = 1;

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace

void write_checkpoint(std::ostream& os, const Checkpoint& ck) {
    ck.params.validate(ck.spec);
    os << kMagic << " v" << kVersion << "\n";
    os << "widths";
    for (std::size_t w : ck.spec.widths) os << ' ' << w;
    os << "\nnonlinearity " << to_string(ck.spec.nonlinearity) << "\n";
    os << "scale_features " << (ck.spec.scale_features ? 1 : 0) << "\n";
    os << "output_bias " << (ck.spec.output_bias ? 1 : 0) << "\n";
    for (std::size_t i = 0; i < ck.params.weights.size(); ++i) {
        const Matrix& w = ck.params.weights[i];
        os << "weights " << i << ' ' << w.rows() << ' ' << w.cols() << "\n";
        for (std::size_t r = 0; r < w.rows(); ++r) {
            for (std::size_t c = 0; c < w.cols(); ++c)
                os << (c ? " " : "") << fmt(w(r, c));
            os << "\n";
        }
        const Vec& b = ck.params.biases[i];
        os << "bias " << i << ' ' << b.size() << "\n";
        for (std::size_t j = 0; j < b.size(); ++j) os << (j ? " " : "") << fmt(b[j]);
        if (!b.empty()) os << "\n";
    }
}

void write_checkpoint_file(const std::string& path, const Checkpoint& ck) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    write_checkpoint(os, ck);
}

Checkpoint read_checkpoint(std::istream& is) {
    Checkpoint ck;
    std::string magic, version;
    is >> magic >> version;
    if (magic != kMagic || version != "v1")
        throw std::runtime_error("not a dropgp checkpoint (or unknown version)");

    std::string key;
    is >> key;
    if (key != "widths") throw std::runtime_error("checkpoint: expected widths");
    {
        std::string line;
        std::getline(is, line);
        std::istringstream ls(line);
        std::size_t w;
        while (ls >> w) ck.spec.widths.push_back(w);
    }
    std::string nl;
    int flag;
    is >> key >> nl;
    if (key != "nonlinearity") throw std::runtime_error("checkpoint: expected nonlinearity");
    ck.spec.nonlinearity = nonlinearity_from_string(nl);
    is >> key >> flag;
    if (key != "scale_features") throw std::runtime_error("checkpoint: expected scale_features");
    ck.spec.scale_features = flag != 0;
    is >> key >> flag;
    if (key != "output_bias") throw std::runtime_error("checkpoint: expected output_bias");
    ck.spec.output_bias = flag != 0;
    ck.spec.validate();

    const std::size_t l = ck.spec.num_weight_layers();
    for (std::size_t i = 0; i < l; ++i) {
        std::size_t idx, rows, cols, len;
        is >> key >> idx >> rows >> cols;
        if (key != "weights" || idx != i)
            throw std::runtime_error("checkpoint: malformed weights block");
        Matrix w(rows, cols);
        for (std::size_t j = 0; j < w.size(); ++j)
            if (!(is >> w.data()[j]))
                throw std::runtime_error("checkpoint: truncated weights block");
        ck.params.weights.push_back(std::move(w));
        is >> key >> idx >> len;
        if (key != "bias" || idx != i)
            throw std::runtime_error("checkpoint: malformed bias block");
        Vec b(len);
        for (std::size_t j = 0; j < len; ++j)
            if (!(is >> b[j])) throw std::runtime_error("checkpoint: truncated bias block");
        ck.params.biases.push_back(std::move(b));
    }
    ck.params.validate(ck.spec);
    return ck;
}

Checkpoint read_checkpoint_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
    return read_checkpoint(is);
}

} // namespace dropgp
