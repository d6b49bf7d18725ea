#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cocontact/examples.hpp"

namespace cocontact::cli {

enum ExitCode : int { ok = 0, usage = 2, verification_failed = 3, runtime = 4 };

/// Entry point behind the `cocontact` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Key/value system description:
///
///   # comment
///   kind = hamiltonian            (or lagrangian)
///   n = 1
///   expression = p1^2/(2*m) + kappa*z/m
///   param.m = 1
///   domain = q1^2 + p1^2 - 0.01   (optional; points where it is <= 0 are excluded)
///   initial = 0, 1, 0             (non-t coordinates in chart order)
///   t1 = 1
///   box = -2:2                    (one lo:hi for every non-t coordinate, or one per coordinate)
///   quantity.p = dissipated: p1
///   symmetry.Y = 0; 0; 1; 0
///   expect.Y = generalized_dynamical: pass, dynamical: fail
///   cartan.Y = rho; g             (optional witness)
///
/// `overrides` replace param.* values. Throws ParamSchemaError on malformed
/// input.
ExampleEntry parse_system_file(std::string_view text, const ParamText& overrides = {}, std::string name = "file");

/// An existing file path is read as a system file, anything else is an
/// example name.
ExampleEntry load_system(const std::string& spec, const ParamText& overrides = {});

}  // namespace cocontact::cli
