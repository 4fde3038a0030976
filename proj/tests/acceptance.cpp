// Acceptance: one line per criterion; nonzero exit if any criterion fails.

#include <iostream>

#include "hypdist/battery.hpp"

int main() {
  hypdist::BatteryConfig cfg;
  cfg.group_dir = HYPDIST_DATA_DIR;
  const hypdist::BatteryReport r = hypdist::run_battery(cfg, &std::cerr);
  for (const auto& c : r.criteria)
    std::cout << "criterion " << c.id << ": " << (c.pass ? "PASS" : "FAIL") << "  " << c.title << "  [" << c.summary
              << "]\n";
  std::cout << (r.all_pass() ? "all criteria pass" : "some criteria FAIL") << "\n";
  return r.all_pass() ? 0 : 1;
}
