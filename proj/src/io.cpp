#include "mclab/io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>
#include <vector>

namespace mclab {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("cannot write " + path);
    return out;
}

// Reads the "# ..." header line and returns the fields after the marker.
// line_no counts physical lines consumed so far; errors report 1-based positions.
std::istringstream header_fields(std::istream& in, const char* what, Index& line_no) {
    std::string line;
    if (!std::getline(in, line)) fail(std::string(what) + ": line 1: missing header");
    ++line_no;
    std::istringstream fields(line);
    std::string marker;
    fields >> marker;
    if (marker != "#")
        fail(std::string(what) + ": line " + std::to_string(line_no) +
             ": header must start with '#'");
    return fields;
}

void read_block(std::istream& in, Matrix& M, const char* what, Index& line_no) {
    for (Index i = 0; i < M.rows(); ++i) {
        std::string line;
        do {
            if (!std::getline(in, line))
                fail(std::string(what) + ": block truncated after line " +
                     std::to_string(line_no));
            ++line_no;
        } while (line.find_first_not_of(" \t\r") == std::string::npos);
        std::istringstream row(line);
        for (Index j = 0; j < M.cols(); ++j)
            if (!(row >> M(i, j)))
                fail(std::string(what) + ": line " + std::to_string(line_no) + ": bad value");
        double extra;
        if (row >> extra)
            fail(std::string(what) + ": line " + std::to_string(line_no) + ": too many values");
    }
}

void write_block(std::ostream& out, const Matrix& M) {
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index j = 0; j < M.cols(); ++j) {
            if (j) out << ' ';
            out << M(i, j);
        }
        out << '\n';
    }
}

}  // namespace

std::string sampling_model_name(SamplingModel model) {
    switch (model) {
        case SamplingModel::UniformNoReplace: return "uniform-no-replace";
        case SamplingModel::WithReplace: return "with-replace";
        case SamplingModel::Bernoulli: return "bernoulli";
    }
    fail("unknown sampling model");
}

SamplingModel parse_sampling_model(const std::string& name) {
    if (name == "uniform-no-replace") return SamplingModel::UniformNoReplace;
    if (name == "with-replace") return SamplingModel::WithReplace;
    if (name == "bernoulli") return SamplingModel::Bernoulli;
    fail("unknown sampling model '" + name + "'");
}

std::string matrix_model_name(MatrixModel model) {
    switch (model) {
        case MatrixModel::Haar: return "haar";
        case MatrixModel::BoundedEntry: return "bounded-entry";
        case MatrixModel::Spiky: return "spiky";
    }
    fail("unknown matrix model");
}

MatrixModel parse_matrix_model(const std::string& name) {
    if (name == "haar") return MatrixModel::Haar;
    if (name == "bounded-entry") return MatrixModel::BoundedEntry;
    if (name == "spiky") return MatrixModel::Spiky;
    fail("unknown matrix model '" + name + "'");
}

Matrix read_matrix(std::istream& in) {
    Index line_no = 0;
    auto fields = header_fields(in, "matrix", line_no);
    Index n1, n2;
    if (!(fields >> n1 >> n2) || n1 < 1 || n2 < 1) fail("matrix: line 1: bad header dimensions");
    Matrix M(n1, n2);
    read_block(in, M, "matrix", line_no);
    return M;
}

Matrix read_matrix_file(const std::string& path) {
    auto in = open_in(path);
    return read_matrix(in);
}

void write_matrix(std::ostream& out, const Matrix& M) {
    out << std::setprecision(17);
    out << "# " << M.rows() << ' ' << M.cols() << '\n';
    write_block(out, M);
}

void write_matrix_file(const std::string& path, const Matrix& M) {
    auto out = open_out(path);
    write_matrix(out, M);
}

LowRankFactorization read_factorization(std::istream& in) {
    Index line_no = 0;
    auto fields = header_fields(in, "factorization", line_no);
    LowRankFactorization f;
    if (!(fields >> f.n1 >> f.n2 >> f.r) || f.n1 < 1 || f.n2 < 1 || f.r < 1)
        fail("factorization: line 1: bad header dimensions");
    f.U.resize(f.n1, f.r);
    read_block(in, f.U, "factorization U", line_no);
    Matrix Srow(1, f.r);
    read_block(in, Srow, "factorization S", line_no);
    f.S = Srow.row(0).transpose();
    f.V.resize(f.n2, f.r);
    read_block(in, f.V, "factorization V", line_no);
    f.validate();
    return f;
}

LowRankFactorization read_factorization_file(const std::string& path) {
    auto in = open_in(path);
    return read_factorization(in);
}

void write_factorization(std::ostream& out, const LowRankFactorization& f) {
    out << std::setprecision(17);
    out << "# " << f.n1 << ' ' << f.n2 << ' ' << f.r << '\n';
    write_block(out, f.U);
    out << '\n';
    write_block(out, Matrix(f.S.transpose()));
    out << '\n';
    write_block(out, f.V);
}

void write_factorization_file(const std::string& path, const LowRankFactorization& f) {
    auto out = open_out(path);
    write_factorization(out, f);
}

ObservationSet read_observations(std::istream& in) {
    Index line_no = 0;
    auto fields = header_fields(in, "observations", line_no);
    Index n1, n2, m;
    std::string model_name;
    uint64_t seed;
    if (!(fields >> n1 >> n2 >> m >> model_name >> seed))
        fail("observations: line 1: bad header");
    const SamplingModel model = parse_sampling_model(model_name);

    std::vector<std::pair<Index, Index>> draws;
    std::map<std::pair<Index, Index>, double> value_of;
    bool any_value = false, any_bare = false;
    std::string line;
    std::map<std::pair<Index, Index>, bool> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream row(line);
        Index a, b, count;
        if (!(row >> a >> b >> count) || count < 1)
            fail("observations: line " + std::to_string(line_no) + ": bad cell");
        if (a < 0 || a >= n1 || b < 0 || b >= n2)
            fail("observations: line " + std::to_string(line_no) + ": cell index out of range");
        if (seen[{a, b}])
            fail("observations: line " + std::to_string(line_no) +
                 ": cell repeated (inconsistent duplicates are not representable)");
        seen[{a, b}] = true;
        double value;
        if (row >> value) {
            any_value = true;
            value_of[{a, b}] = value;
        } else {
            any_bare = true;
        }
        for (Index k = 0; k < count; ++k) draws.emplace_back(a, b);
    }
    if (any_value && any_bare)
        fail("observations: value column must be present on every line or none");
    if (Index(draws.size()) != m)
        fail("observations: multiplicities sum to " + std::to_string(draws.size()) +
             " but header says m = " + std::to_string(m));

    ObservationSet obs = ObservationSet::from_draws(n1, n2, model, seed, std::move(draws));
    if (model == SamplingModel::WithReplace) {
        // The file stores multiplicities, not draw order, but partitioned
        // certificates need the original i.i.d. sequence. Each draw is a pure
        // function of (seed, index), so replaying the recorded seed recovers
        // the order; keep the replay whenever it explains the stored multiset.
        ObservationSet replay = sample_with_replacement(n1, n2, obs.m(), seed);
        bool same = replay.cells.size() == obs.cells.size();
        for (size_t i = 0; same && i < obs.cells.size(); ++i)
            same = replay.cells[i].a == obs.cells[i].a &&
                   replay.cells[i].b == obs.cells[i].b &&
                   replay.cells[i].count == obs.cells[i].count;
        if (same) obs.draws = std::move(replay.draws);
    }
    if (any_value) {
        obs.values.resize(obs.cells.size());
        for (size_t i = 0; i < obs.cells.size(); ++i)
            obs.values[i] = value_of.at({obs.cells[i].a, obs.cells[i].b});
    }
    return obs;
}

ObservationSet read_observations_file(const std::string& path) {
    auto in = open_in(path);
    return read_observations(in);
}

void write_observations(std::ostream& out, const ObservationSet& obs) {
    out << std::setprecision(17);
    out << "# " << obs.n1 << ' ' << obs.n2 << ' ' << obs.m() << ' '
        << sampling_model_name(obs.model) << ' ' << obs.seed << '\n';
    for (size_t i = 0; i < obs.cells.size(); ++i) {
        const auto& c = obs.cells[i];
        out << c.a << ' ' << c.b << ' ' << c.count;
        if (obs.has_values()) out << ' ' << obs.values[i];
        out << '\n';
    }
}

void write_observations_file(const std::string& path, const ObservationSet& obs) {
    auto out = open_out(path);
    write_observations(out, obs);
}

}  // namespace mclab
