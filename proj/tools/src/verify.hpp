#pragma once

#include <string>
#include <vector>

#include "grushin/dynamics.hpp"
#include "grushin/profile.hpp"

namespace grushin::cli {

struct CheckRow {
  std::string profile;
  std::string check;
  bool pass = false;
  double value = 0.0;  // worst observed error or the checked quantity
  double tol = 0.0;
};

// Quick invariant sweep for one profile; the f = r closed forms get extra rows.
std::vector<CheckRow> run_verify(const Profile& p, const DynamicsOptions& opts = {});

}  // namespace grushin::cli
