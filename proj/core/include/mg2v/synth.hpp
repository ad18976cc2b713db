#pragma once

#include <cstdint>
#include <string>

#include "mg2v/typed_graph.hpp"

namespace mg2v {

// Bibliographic-style HIN generator with planted communities. Community
// structure is carried by both the venue route (papers publish in community
// venues) and the co-author route (papers are written by community authors),
// so either relation type alone carries label signal.
struct SynthConfig {
  int communities = 4;
  int authors_per_community = 500;
  int papers_per_community = 750;
  int venues_per_community = 5;
  int min_authors_per_paper = 1;
  int max_authors_per_paper = 3;
  double venue_retention = 1.0;       // probability a paper gets a venue edge
  double cross_community_prob = 0.0;  // per edge endpoint, pick a foreign community
  bool cite_edges = false;            // optional P->P cite relation
  uint64_t seed = 1;

  void validate() const;  // throws Error on infeasible settings
};

// Schema: A -write-> P, V -publish-> P (+ P -cite-> P when enabled). Authors
// carry their community index as label. Deterministic in (config, seed).
TypedGraph generate_hin(const SynthConfig& config);

// Removes the publish/publish^-1 edges of floor(fraction * #papers) uniformly
// sampled papers; everything else, labels included, is untouched.
TypedGraph sparsify_venues(const TypedGraph& g, double fraction, uint64_t seed);

// Writes <prefix>.nodes, <prefix>.edges, <prefix>.schema and <prefix>.labels.
void save_hin_files(const TypedGraph& g, const std::string& prefix);

}  // namespace mg2v
