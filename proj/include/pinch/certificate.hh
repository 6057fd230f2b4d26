#pragma once

#include <string>

namespace pinch {

// Verdict of the sampled within-stage support disjointness check.
struct DisjointnessCertificate {
  bool ok = true;
  int first = -1;  // offending pair, indices into the map list
  int second = -1;
  long pairs_checked = 0;
  std::string detail;
};

}  // namespace pinch
