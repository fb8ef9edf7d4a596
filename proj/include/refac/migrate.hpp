#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "refac/schemes.hpp"

namespace refac {

/// The old API implemented in terms of the new one.
struct AdapterModule {
  std::vector<Definition> new_defs;
  std::vector<AdapterSpec> adapters;  // remove_old = true, new_defs empty
};

/// A reference to an old API name that no adapter covers (wrong arity).
struct Residual {
  std::string name;
  int arity = 0;
  std::string location;  // key of the enclosing definition
};

struct MigrationReport {
  std::map<FunKey, std::size_t> sites;
  std::vector<Residual> residual;
  std::map<RuleId, std::size_t> rule_firings;
};

struct MigrationResult {
  Program output;
  MigrationReport report;
};

struct MigrateOptions {
  Strategy strategy;
  TraceSink trace;
};

/// Same format as a single adapter file, with any number of entries.
AdapterModule parse_adapter_module(std::string_view text, Flavor flavor);
AdapterModule load_adapter_module(const std::string& path, Flavor flavor);

/// Inlines every adapter into `client` (in file order; repeated while
/// adapters reintroduce covered references), then normalizes once.
MigrationResult migrate(const Program& client, const AdapterModule& module,
                        const MigrateOptions& opts = {});

std::string report_text(const MigrationReport& r);
std::string report_json(const MigrationReport& r);

}  // namespace refac
