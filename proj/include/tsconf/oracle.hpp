#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "tsconf/dependence.hpp"
#include "tsconf/processes.hpp"

/**
 * Brute-force reference path for the exact-computation machinery. Everything
 * here enumerates sequences directly into sparse maps and follows the
 * definitions literally, sharing no code with the dense-pmf implementation
 * it cross-checks.
 */
namespace tsconf::oracle {

using Sequence = std::vector<int>;
using SeqLaw = std::map<Sequence, double>;

SeqLaw enumerate_markov(const FiniteMarkovSpec& spec, std::size_t m);
SeqLaw enumerate_cyclic(const CyclicMixtureSpec& spec, std::size_t m);

double tv(const SeqLaw& p, const SeqLaw& q);

/// Switch coefficient straight from the four-case subvector definition.
double psi(const SeqLaw& law, std::size_t k, std::size_t tau);

/// beta-mixing coefficient by direct marginalization over split points.
double beta(const SeqLaw& law, std::size_t tau);

/**
 * Exact coverage by the rank-count route: the test score's position among
 * all scores (S_{L+1}, ..., S_{n+1}) against ceil((1-alpha)(n-L+1)). Ties
 * are averaged over every tie-break position when jitter is on.
 */
double exact_coverage_rank_count(const SeqLaw& law, const FiniteScore& score,
                                 double alpha, bool jitter);

}  // namespace tsconf::oracle
