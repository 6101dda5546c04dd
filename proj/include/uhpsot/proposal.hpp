#pragma once

#include <string>

#include "uhpsot/box.hpp"

namespace uhpsot {

enum class ProposalSource { appearance, trajectory, background };

std::string to_string(ProposalSource source);

/// Candidate box tagged with the module that produced it and its
/// correlation score against the prescribed template.
struct Proposal {
    BoundingBox box;
    ProposalSource source = ProposalSource::appearance;
    double score = 0.0;
};

} // namespace uhpsot
