/*
 Copyright 2026 The phes Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef PHES_TYPES_HPP
#define PHES_TYPES_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace phes {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Base error for everything thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inconsistent vector/matrix dimensions.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A numerical precondition failed (singular matrix, non-PD factor input, blow-up).
class NumericError : public Error {
public:
    using Error::Error;
};

/// Input was well-formed but no certificate / feasible gain exists.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration or expression text.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column)
        : Error(what + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line_(line), column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Phase-space point of a mechanical system. q and p share dimension n.
struct State {
    Vec q;
    Vec p;

    State() = default;
    State(Vec q_in, Vec p_in);

    Index dof() const { return q.size(); }
    /// col(q, p)
    Vec stacked() const;
    static State from_stacked(const Vec& x);
    bool finite() const;
};

/// Spectral (induced 2-) norm.
double spectral_norm(const Mat& m);
double min_eigenvalue(const Mat& symmetric);
double max_eigenvalue(const Mat& symmetric);
Mat sym_part(const Mat& m);

/// Residual ||M - M^T|| in the max-abs sense.
double symmetry_residual(const Mat& m);

void require_same_size(Index a, Index b, const char* what);

/// "%.17g" formatting for bit-exact decimal output.
std::string format_g17(double value);

/// Shortest decimal that parses back to the same double, for labels and
/// comment lines.
std::string format_shortest(double value);

}  // namespace phes

#endif  // PHES_TYPES_HPP
