#include "keo/fixture.hpp"

#include <array>

#include "keo/util.hpp"

namespace keo {

namespace {

const std::vector<std::string>& components() {
  static const std::vector<std::string> v = {
      "FUEL PUMP",          "LEFT MAGNETO",     "CARBURETOR",        "FUEL LINE",
      "LANDING GEAR",       "HYDRAULIC PUMP",   "PITOT TUBE",        "OIL COOLER",
      "EXHAUST VALVE",      "PROPELLER GOVERNOR", "FUEL SELECTOR VALVE", "ALTERNATOR BELT",
      "BRAKE CALIPER",      "ELEVATOR TRIM TAB", "VACUUM PUMP",      "SPARK PLUG HARNESS",
      "THROTTLE CABLE",     "NOSE GEAR STRUT",  "FUEL TANK SUMP",    "CYLINDER HEAD",
  };
  return v;
}

const std::vector<std::string>& systems() {
  static const std::vector<std::string> v = {
      "FUEL SYSTEM",          "ELECTRICAL SYSTEM", "HYDRAULIC SYSTEM",
      "IGNITION SYSTEM",      "EXHAUST SYSTEM",    "LANDING GEAR ASSEMBLY",
      "FLIGHT CONTROL SYSTEM", "PNEUMATIC SYSTEM",
  };
  return v;
}

const std::vector<std::string>& failures() {
  static const std::vector<std::string> v = {
      "ENGINE QUIT",        "TOTAL POWER LOSS", "ROUGH RUNNING ENGINE", "OIL PRESSURE DROP",
      "ELECTRICAL FAILURE", "HYDRAULIC LEAK",   "FUEL STARVATION",      "INFLIGHT VIBRATION",
      "GEAR COLLAPSE",      "SMOKE IN COCKPIT", "PARTIAL POWER LOSS",   "BRAKE FADE",
  };
  return v;
}

const std::vector<std::string>& causes() {
  static const std::vector<std::string> v = {
      "CARBURETOR ICE",        "WATER IN FUEL SYSTEM",  "FROZEN FUEL TANK SUMPS",
      "FATIGUE CRACK",         "CORRODED TERMINAL",     "LOOSE JAM NUT",
      "WORN BUSHING",          "CONTAMINATED FUEL",     "BROKEN SAFETY WIRE",
      "CHAFED WIRING HARNESS", "CLOGGED FUEL STRAINER", "OVERTORQUED FITTING",
  };
  return v;
}

const std::vector<std::string>& locations() {
  static const std::vector<std::string> v = {
      "KITTY HAWK FIELD", "RUNWAY 27",        "HANGAR 3",
      "MUNICIPAL AIRPORT", "GRASS STRIP NINE", "COASTAL AIRFIELD",
  };
  return v;
}

const std::vector<std::string>& maintainers() {
  static const std::vector<std::string> v = {
      "LINE MECHANIC", "CHIEF INSPECTOR", "AVIONICS SHOP", "ENGINE OVERHAUL FACILITY",
      "LOCAL REPAIR STATION",
  };
  return v;
}

const std::vector<std::string>& operators_pool() {
  static const std::vector<std::string> v = {
      "CHARTER OPERATOR", "FLIGHT SCHOOL", "CROP DUSTING SERVICE", "REGIONAL CARRIER",
  };
  return v;
}

const std::vector<std::string>& months() {
  static const std::vector<std::string> v = {
      "JANUARY", "FEBRUARY", "MARCH",     "APRIL",   "MAY",      "JUNE",
      "JULY",    "AUGUST",   "SEPTEMBER", "OCTOBER", "NOVEMBER", "DECEMBER",
  };
  return v;
}

const std::string& pick(const std::vector<std::string>& pool, Rng& rng) {
  return pool[rng.bounded(pool.size())];
}

std::string make_sentence(Rng& rng) {
  switch (rng.bounded(7)) {
    case 0: return pick(causes(), rng) + " CAUSED " + pick(failures(), rng) + ".";
    case 1: return pick(failures(), rng) + " OCCURRED AT " + pick(locations(), rng) + ".";
    case 2: return pick(components(), rng) + " IS PART OF " + pick(systems(), rng) + ".";
    case 3: return pick(components(), rng) + " MAINTAINED BY " + pick(maintainers(), rng) + ".";
    case 4: {
      const std::string& a = pick(failures(), rng);
      const std::string& b = pick(failures(), rng);
      return a + " FOLLOWED BY " + (b == a ? "FORCED LANDING" : b) + ".";
    }
    case 5:
      return pick(failures(), rng) + " REPORTED DURING " + pick(months(), rng) + " " +
             std::to_string(2019 + rng.bounded(3)) + ".";
    default: return pick(components(), rng) + " USED BY " + pick(operators_pool(), rng) + ".";
  }
}

}  // namespace

std::vector<Record> make_fixture_corpus(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Record> records;
  records.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t sentences = 1 + rng.bounded(3);
    std::string text;
    for (std::size_t s = 0; s < sentences; ++s) {
      if (s) text += " ";
      text += make_sentence(rng);
    }
    char id[32];
    std::snprintf(id, sizeof(id), "rec-%04zu", i);
    char date[32];
    std::snprintf(date, sizeof(date), "%04zu-%02zu-%02zu", 2019 + rng.bounded(3),
                  1 + rng.bounded(12), 1 + rng.bounded(28));
    records.push_back(Record{id, text, std::string(date)});
  }
  return records;
}

std::vector<ProblemAction> make_fixture_pairs(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  static const std::array<const char*, 4> observed = {
      "is observed during pre-flight inspection", "recurs after maintenance sign-off",
      "appears during high-power ground runs", "is reported by multiple crews"};
  std::vector<ProblemAction> pairs;
  pairs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::string component = to_lower(pick(components(), rng));
    const std::string system = to_lower(pick(systems(), rng));
    const std::string problem = "a recurring " + component + " vibration " +
                                observed[rng.bounded(observed.size())];
    const std::string action = "Replace the " + component + " and run a " + system +
                               " vibration diagnostic.";
    pairs.push_back(ProblemAction{problem, action});
  }
  return pairs;
}

}  // namespace keo
