#include "gsnk/method.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <numeric>
#include <utility>

#include "gsnk/errors.hpp"

namespace gsnk {

namespace {

constexpr std::array<std::pair<MethodKind, std::string_view>, 11> kNames{{
    {MethodKind::NK, "NK"},
    {MethodKind::NURK, "NURK"},
    {MethodKind::NRK, "NRK"},
    {MethodKind::MR_SNK, "MR-SNK"},
    {MethodKind::MD_SNK, "MD-SNK"},
    {MethodKind::MR_NK, "MR-NK"},
    {MethodKind::MD_NK, "MD-NK"},
    {MethodKind::MR_BSNK1, "MR-BSNK1"},
    {MethodKind::MD_BSNK1, "MD-BSNK1"},
    {MethodKind::MR_BSNK2, "MR-BSNK2"},
    {MethodKind::MD_BSNK2, "MD-BSNK2"},
}};

}  // namespace

std::string_view to_string(MethodKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "?";
}

MethodKind parse_method_kind(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return c == '_' ? '-' : static_cast<char>(std::toupper(c)); });
  for (const auto& [k, n] : kNames) {
    if (n == upper) return k;
  }
  throw InputError("unknown method '" + std::string(name) + "'");
}

std::vector<MethodKind> brown_table_methods() {
  return {MethodKind::NRK,      MethodKind::MR_SNK,   MethodKind::MD_SNK,  MethodKind::MR_BSNK1,
          MethodKind::MD_BSNK1, MethodKind::MR_BSNK2, MethodKind::MD_BSNK2};
}

bool Method::uses_beta() const {
  switch (kind) {
    case MethodKind::MR_SNK:
    case MethodKind::MD_SNK:
    case MethodKind::MR_BSNK1:
    case MethodKind::MD_BSNK1:
      return true;
    default:
      return false;
  }
}

bool Method::uses_nu() const {
  return kind == MethodKind::MR_BSNK2 || kind == MethodKind::MD_BSNK2;
}

bool Method::is_block() const {
  return kind == MethodKind::MR_BSNK1 || kind == MethodKind::MD_BSNK1 || uses_nu();
}

bool Method::is_greedy() const { return rule().has_value(); }

std::optional<GreedyRule> Method::rule() const {
  switch (kind) {
    case MethodKind::MR_SNK:
    case MethodKind::MR_NK:
    case MethodKind::MR_BSNK1:
    case MethodKind::MR_BSNK2:
      return GreedyRule::MaxResidual;
    case MethodKind::MD_SNK:
    case MethodKind::MD_NK:
    case MethodKind::MD_BSNK1:
    case MethodKind::MD_BSNK2:
      return GreedyRule::MaxDistance;
    default:
      return std::nullopt;
  }
}

Index Method::subset_size(Index m) const {
  if (kind == MethodKind::MR_NK || kind == MethodKind::MD_NK) return m;
  return beta;
}

void Method::validate(Index m) const {
  if (m < 1) throw InputError("method needs at least one row");
  if (uses_beta() && (beta < 1 || beta > m)) {
    throw InputError(name() + ": beta=" + std::to_string(beta) + " outside [1, " +
                     std::to_string(m) + "]");
  }
  if (uses_nu()) {
    if (nu < 1 || nu > m) {
      throw InputError(name() + ": nu=" + std::to_string(nu) + " outside [1, " +
                       std::to_string(m) + "]");
    }
    if (!block_sizes.empty()) {
      if (static_cast<Index>(block_sizes.size()) != nu) {
        throw InputError(name() + ": block size list must have nu entries");
      }
      const Index total = std::accumulate(block_sizes.begin(), block_sizes.end(), Index{0});
      if (total != m || std::any_of(block_sizes.begin(), block_sizes.end(),
                                    [](Index s) { return s < 1; })) {
        throw InputError(name() + ": block sizes must be positive and sum to " +
                         std::to_string(m));
      }
    }
  }
}

std::string Method::name() const { return std::string(to_string(kind)); }

}  // namespace gsnk
