// Dummy-condition adjustments (dB) reported for the 17 listeners.
#ifndef BOOSTER_TESTS_TABLE_ONE_HPP
#define BOOSTER_TESTS_TABLE_ONE_HPP

#include <booster/stats/screening.hpp>

inline booster::stats::DummyTable dummy_table_fixture() {
  return {
      {"P1", {0, 0, 4}},      {"P2", {0, 0, 1, 0}},    {"P3", {2, -1, -1}},  {"P4", {-2, 0, 0}},
      {"P5", {1, 1, 0, 2}},   {"P6", {-1, 1, 1}},      {"P7", {0, 0, 0, 1}}, {"P8", {1, 0, 0}},
      {"P9", {2, 5, 1}},      {"P10", {-1, -2, 2, 2}}, {"P11", {0, 0, 0}},   {"P12", {1, 1, 1}},
      {"P13", {0, 0, 1, 0}},  {"P14", {-1, 0, -1}},   {"P15", {0, 0, 0, 0}}, {"P16", {2, 2, 0}},
      {"P17", {1, 0, 2}},
  };
}

#endif
