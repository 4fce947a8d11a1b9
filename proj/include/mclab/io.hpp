#pragma once

#include <iosfwd>
#include <string>

#include "mclab/model.hpp"
#include "mclab/sampling.hpp"

namespace mclab {

// Text formats, 0-based indices throughout.
//   matrix:        "# n1 n2" then n1 rows of n2 floats.
//   factorization: "# n1 n2 r", U block (n1 rows of r), blank line, one line
//                  of r singular values, blank line, V block (n2 rows of r).
//   observations:  "# n1 n2 m model seed" then one line per distinct cell,
//                  "a b multiplicity [value]", value column all-or-none.
// Reading an observation file rebuilds the draw list; for with-replacement
// sets the reader replays the header seed and restores the original draw
// order whenever the replay reproduces the stored multiset, so a genuine
// sample survives the round trip intact (hand-edited files fall back to
// file order). All parse failures throw std::invalid_argument naming the
// offending line.

std::string sampling_model_name(SamplingModel model);
SamplingModel parse_sampling_model(const std::string& name);
std::string matrix_model_name(MatrixModel model);
MatrixModel parse_matrix_model(const std::string& name);

Matrix read_matrix(std::istream& in);
Matrix read_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const Matrix& M);
void write_matrix_file(const std::string& path, const Matrix& M);

LowRankFactorization read_factorization(std::istream& in);
LowRankFactorization read_factorization_file(const std::string& path);
void write_factorization(std::ostream& out, const LowRankFactorization& f);
void write_factorization_file(const std::string& path, const LowRankFactorization& f);

/// The text format aggregates multiplicities per cell, so draw order is not
/// stored. For with-replacement sets the reader replays the header seed and
/// restores the original order whenever the replay matches the multiset.
ObservationSet read_observations(std::istream& in);
ObservationSet read_observations_file(const std::string& path);
void write_observations(std::ostream& out, const ObservationSet& obs);
void write_observations_file(const std::string& path, const ObservationSet& obs);

}  // namespace mclab
