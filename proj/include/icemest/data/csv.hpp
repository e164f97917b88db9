#pragma once

#include <iosfwd>
#include <string>

#include "icemest/data/dataset.hpp"

namespace icemest::data {

// Wide CSV, one row per unit.  Column names: A{k} (treatments, k from 0),
// C{k} and Y{k} (censoring and outcomes, k from 1), L{k}_{name}
// (covariates).  Missing values are empty cells.  The horizon is inferred
// from the outcome columns; the loader rejects unknown headers, non-numeric
// cells, and non-binary A/C values, then runs validate() on the result.
LongitudinalDataset load_csv(const std::string& path);
LongitudinalDataset load_csv(std::istream& in);

void save_csv(const LongitudinalDataset& data, const std::string& path);
void save_csv(const LongitudinalDataset& data, std::ostream& out);

}  // namespace icemest::data
