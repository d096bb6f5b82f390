#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsnk/sampling.hpp"
#include "gsnk/types.hpp"

namespace gsnk {

enum class MethodKind {
  NK,        ///< cyclic rows
  NURK,      ///< uniform rows
  NRK,       ///< rows drawn proportionally to |f_i|^2
  MR_SNK,    ///< uniform subset, max-residual pick
  MD_SNK,    ///< uniform subset, max-distance pick
  MR_NK,     ///< MR_SNK with beta = m
  MD_NK,     ///< MD_SNK with beta = m
  MR_BSNK1,  ///< block step on the threshold-expanded set
  MD_BSNK1,
  MR_BSNK2,  ///< block step on one representative per partition block
  MD_BSNK2,
};

/// A method tag with its parameters. `beta` applies to the *SNK and *BSNK1
/// families, `nu` (and optionally explicit block sizes) to *BSNK2.
struct Method {
  MethodKind kind = MethodKind::MR_SNK;
  Index beta = 1;
  Index nu = 1;
  std::vector<Index> block_sizes;  ///< empty: default_block_sizes(m, nu)

  bool uses_beta() const;
  bool uses_nu() const;
  bool is_block() const;
  bool is_greedy() const;
  std::optional<GreedyRule> rule() const;

  /// Effective subset size for a ground set of `m` rows (m for *-NK).
  Index subset_size(Index m) const;

  /// Throws InputError when beta / nu / block sizes do not fit `m` rows.
  void validate(Index m) const;

  std::string name() const;
};

std::string_view to_string(MethodKind kind);

/// Accepts the names printed by to_string ("MR-SNK", "md-bsnk2", ...).
MethodKind parse_method_kind(std::string_view name);

/// The seven methods compared in the Brown iteration-count table.
std::vector<MethodKind> brown_table_methods();

}  // namespace gsnk
