#include <gtest/gtest.h>

#include <set>

#include "pb/repro.hpp"

using namespace pb;

TEST(Repro, IdsAreUnique) {
  std::set<std::string> ids;
  for (const auto& c : repro_cases()) EXPECT_TRUE(ids.insert(c.id).second) << c.id;
  EXPECT_GE(ids.size(), 9u);
}

TEST(Repro, EveryExpectationHolds) {
  for (const auto& c : repro_cases()) {
    ReproRecorder rec;
    c.run(rec);
    EXPECT_FALSE(rec.items().empty()) << c.id;
    for (const auto& e : rec.items())
      EXPECT_TRUE(e.passed) << c.id << ": " << e.description << " [" << to_string(e.provenance) << "] observed "
                            << e.detail;
  }
}
