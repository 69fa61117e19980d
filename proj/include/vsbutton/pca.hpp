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
#ifndef VSBUTTON_PCA_HPP
#define VSBUTTON_PCA_HPP

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vsbutton/csi.hpp"

namespace vsbutton {

// Principal directions of a set of amplitude rows. Column i of `components`
// is the i-th direction (1-indexed as i+1 in keep lists), sorted by
// descending eigenvalue; each column's largest-magnitude entry is positive.
struct PcaBasis {
    Vector mean_row;
    Matrix components;
    Vector eigenvalues;

    Eigen::Index dimension() const { return mean_row.size(); }
};

// Centre rows, form the sample covariance (1/(n-1)), eigendecompose.
// Throws DegenerateDataError for < 2 rows or zero total variance.
PcaBasis pca_fit(const Matrix &rows);

// (row - mean) projected onto the 1-indexed components in `keep`, in order.
// Throws GeometryError on a dimension mismatch, IndexError on a bad index.
Vector pca_project(const PcaBasis &basis, std::span<const double> row, std::span<const int> keep);

// Checks keep indices against the basis without projecting.
void check_keep(const PcaBasis &basis, std::span<const int> keep);

// Plain-text persistence so a basis fitted at calibration can be reused.
void write_basis(const PcaBasis &basis, std::ostream &out);
PcaBasis read_basis(std::istream &in);
void write_basis_file(const PcaBasis &basis, const std::string &path);
PcaBasis read_basis_file(const std::string &path);

} // namespace vsbutton

#endif
