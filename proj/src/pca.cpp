// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "vsbutton/errors.hpp"
#include "vsbutton/pca.hpp"

namespace vsbutton {

PcaBasis pca_fit(const Matrix &rows) {
    if (rows.rows() < 2)
        throw DegenerateDataError("PCA needs at least two rows");
    if (!rows.allFinite())
        throw DegenerateDataError("PCA input contains non-finite values");

    PcaBasis basis;
    basis.mean_row = rows.colwise().mean().transpose();
    const Matrix centred = rows.rowwise() - basis.mean_row.transpose();
    const Eigen::MatrixXd cov = (centred.transpose() * centred) / double(rows.rows() - 1);
    if (!(cov.trace() > 0.0))
        throw DegenerateDataError("PCA input has zero variance in every column");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw DegenerateDataError("covariance eigendecomposition failed");

    // Eigen returns ascending eigenvalues; reverse into descending order.
    const Eigen::Index d = cov.rows();
    basis.eigenvalues.resize(d);
    basis.components.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const Eigen::Index src = d - 1 - i;
        double lambda = solver.eigenvalues()(src);
        if (lambda < 0.0)
            lambda = 0.0;
        basis.eigenvalues(i) = lambda;
        Eigen::VectorXd v = solver.eigenvectors().col(src);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0)
            v = -v;
        basis.components.col(i) = v;
    }
    return basis;
}

void check_keep(const PcaBasis &basis, std::span<const int> keep) {
    for (int k : keep)
        if (k < 1 || k > basis.components.cols())
            throw IndexError(fmt::format("component index {} outside 1..{}", k, basis.components.cols()));
}

Vector pca_project(const PcaBasis &basis, std::span<const double> row, std::span<const int> keep) {
    if (Eigen::Index(row.size()) != basis.dimension())
        throw GeometryError(fmt::format("row has {} entries, basis expects {}", row.size(), basis.dimension()));
    check_keep(basis, keep);
    const Eigen::Map<const Eigen::VectorXd> r(row.data(), Eigen::Index(row.size()));
    const Eigen::VectorXd centred = r - basis.mean_row;
    Vector out(Eigen::Index(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i)
        out(Eigen::Index(i)) = basis.components.col(keep[i] - 1).dot(centred);
    return out;
}

void write_basis(const PcaBasis &basis, std::ostream &out) {
    const Eigen::Index d = basis.dimension();
    out << "pca-basis 1 " << d << '\n' << std::setprecision(17);
    out << "mean";
    for (Eigen::Index i = 0; i < d; ++i)
        out << ' ' << basis.mean_row(i);
    out << "\neigenvalues";
    for (Eigen::Index i = 0; i < d; ++i)
        out << ' ' << basis.eigenvalues(i);
    out << '\n';
    for (Eigen::Index c = 0; c < d; ++c) {
        out << "component";
        for (Eigen::Index i = 0; i < d; ++i)
            out << ' ' << basis.components(i, c);
        out << '\n';
    }
}

namespace {

Vector read_row(std::istream &in, const char *tag, Eigen::Index d) {
    std::string line;
    if (!std::getline(in, line))
        throw FormatError(fmt::format("basis file ends before '{}' line", tag));
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    if (word != tag)
        throw FormatError(fmt::format("basis file: expected '{}', found '{}'", tag, word));
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i)
        if (!(ss >> v(i)))
            throw FormatError(fmt::format("basis file: short '{}' line", tag));
    return v;
}

} // namespace

PcaBasis read_basis(std::istream &in) {
    std::string magic;
    int version = 0;
    Eigen::Index d = 0;
    in >> magic >> version >> d;
    if (magic != "pca-basis" || version != 1 || d < 1)
        throw FormatError("not a pca-basis v1 file");
    in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    PcaBasis basis;
    basis.mean_row = read_row(in, "mean", d);
    basis.eigenvalues = read_row(in, "eigenvalues", d);
    basis.components.resize(d, d);
    for (Eigen::Index c = 0; c < d; ++c)
        basis.components.col(c) = read_row(in, "component", d);
    return basis;
}

void write_basis_file(const PcaBasis &basis, const std::string &path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError(fmt::format("cannot open {} for writing", path), 0);
    write_basis(basis, out);
}

PcaBasis read_basis_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw Error(fmt::format("cannot open basis {}", path));
    return read_basis(in);
}

} // namespace vsbutton
