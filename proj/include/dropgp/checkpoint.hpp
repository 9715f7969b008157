#pragma once

// Versioned textual checkpoint for a trained network. Entries are written
// with enough digits to round-trip doubles exactly, so equal-seed runs
// produce byte-identical files.

#include <iosfwd>
#include <string>

#include "dropgp/network.hpp"

namespace dropgp {

struct Checkpoint {
    NetworkSpec spec;
    ParamSet params;
};

void write_checkpoint(std::ostream& os, const Checkpoint& ck);
void write_checkpoint_file(const std::string& path, const Checkpoint& ck);
Checkpoint read_checkpoint(std::istream& is);
Checkpoint read_checkpoint_file(const std::string& path);

} // namespace dropgp
