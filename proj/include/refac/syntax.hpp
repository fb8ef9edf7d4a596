#pragma once

#include <string>
#include <string_view>

#include "refac/program.hpp"

namespace refac {

struct SourceFile {
  std::string path;
  Flavor flavor = Flavor::mfe;
  std::string text;
};

/// Flavor from the `.mfe` / `.mfh` extension; throws UsageError otherwise.
Flavor flavor_from_path(std::string_view path);

std::string_view to_string(Flavor flavor);
Flavor parse_flavor(std::string_view name);

SourceFile read_source(const std::string& path);

/// Parses without name resolution. Function names in MFH stay Vars.
Program parse_unresolved(std::string_view text, Flavor flavor);

/// parse_unresolved followed by resolve.
Program parse(const SourceFile& src, const ResolveOptions& opts = {});
Program parse(std::string_view text, Flavor flavor,
              const ResolveOptions& opts = {});

/// A single expression, unresolved. `first_line` offsets reported positions.
Term parse_expr(std::string_view text, Flavor flavor, int first_line = 1);

std::string print(const Program& p);
std::string print(const Definition& d, Flavor flavor);
std::string print(const Term& t, Flavor flavor);

}  // namespace refac
