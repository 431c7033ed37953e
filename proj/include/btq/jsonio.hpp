#ifndef BTQ_JSONIO_HPP
#define BTQ_JSONIO_HPP

#include <json.hpp>

#include "btq/symbols.hpp"

namespace btq {

using Json = nlohmann::ordered_json;

Json poly_to_json(const PolyA& f);
PolyA poly_from_json(const Json& j, int q);
Json kelem_to_json(const KElem& x);
Json matk_to_json(const MatK& m);
Json mata_to_json(const MatA& m);
MatA mata_from_json(const Json& j, int q);

Json complex_to_json(const Complex& c);
Json chain_to_json(const Chain& ch);
Json abgroup_to_json(const AbGroup& g);

// per-orbit report: rep_key, dim, splitting type, stabilizer data and
// truncation flags at the build level
Json quotient_to_json(const QuotientComplex& qc, long long stab_element_cap = 64);
std::string quotient_to_dot(const QuotientComplex& qc);

Json index_report_to_json(const IndexReport& rep, const MSLatticeResult& ms,
                          const BoundConstants& bc, int p);

// structural validation against the bundled schema descriptions; throws
// Error with a path message on mismatch
void validate_quotient_json(const Json& j);
void validate_verdict_json(const Json& j);

}  // namespace btq

#endif
