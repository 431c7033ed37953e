#ifndef BTQ_ERRORS_HPP
#define BTQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace btq {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularMatrix : Error {
  explicit SingularMatrix(const std::string& msg = "singular matrix") : Error(msg) {}
};

struct DegenerateBasis : Error {
  explicit DegenerateBasis(const std::string& msg = "degenerate basis") : Error(msg) {}
};

struct NotSubcomplex : Error {
  explicit NotSubcomplex(const std::string& msg = "not a subcomplex") : Error(msg) {}
};

struct InfiniteChainGroup : Error {
  explicit InfiniteChainGroup(const std::string& msg = "infinite chain group without window") : Error(msg) {}
};

struct NotFinite : Error {
  explicit NotFinite(const std::string& msg = "map is not finite") : Error(msg) {}
};

struct BadSimplicialMap : Error {
  explicit BadSimplicialMap(const std::string& msg = "not a simplicial map") : Error(msg) {}
};

struct NotTopDimensional : Error {
  explicit NotTopDimensional(const std::string& msg = "simplex is not top dimensional") : Error(msg) {}
};

struct SearchBudgetExceeded : Error {
  explicit SearchBudgetExceeded(const std::string& msg = "search budget exceeded") : Error(msg) {}
};

struct BudgetExceeded : Error {
  explicit BudgetExceeded(const std::string& msg = "budget exceeded") : Error(msg) {}
};

struct EnumerationIncomplete : Error {
  explicit EnumerationIncomplete(const std::string& msg = "enumeration incomplete") : Error(msg) {}
};

struct NonStabilized : Error {
  explicit NonStabilized(const std::string& msg = "lattice did not stabilize within budget") : Error(msg) {}
};

struct RankDeficient : Error {
  explicit RankDeficient(const std::string& msg = "rank of symbol lattice below homology rank") : Error(msg) {}
};

struct NoFiltrationFound : Error {
  explicit NoFiltrationFound(const std::string& msg = "no elementary abelian filtration found") : Error(msg) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace btq

#endif
