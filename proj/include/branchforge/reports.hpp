#ifndef BRANCHFORGE_REPORTS_HPP
#define BRANCHFORGE_REPORTS_HPP

#include <string>

#include "branchforge/constructions.hpp"

namespace bf {

// All reports are deterministic JSON: sorted keys, integers only,
// newline-terminated. Identical invocations produce identical bytes.

std::string group_designator(const Presentation& pres);

std::string lemma23_report(const LargeOrderCertificate& cert,
                           const Presentation& pres);
std::string hv_report(const HvFamilySpec& fam, const HvRefutation& ref,
                      const ClosureGapReport& gap, const EmbeddingCheck& emb);
std::string kv_report(const PruferKernelSpec& spec, int m_max,
                      const KvRealization* realization,
                      const std::string& group_designator_or_empty);
std::string erf_report(const AbelianDescriptor& d, const std::string& rule,
                       ErfVerdict verdict);
std::string distinct_report(const HvFamilySpec& a, const HvFamilySpec& b,
                            const DistinctReport& rep);
std::string rist_search_report(const PresentationPtr& pres, const Vertex& v,
                               int radius, const OrderPredicate& pred,
                               bool seeded,
                               const std::vector<RistWitness>& hits);

AbelianDescriptor descriptor_from_json(const std::string& text);
std::string descriptor_to_json(const AbelianDescriptor& d);

// Replays the construction recorded in a report and compares the result
// byte for byte. Returns a JSON verification summary; verified == false
// means a mismatch or a failed check.
struct VerifyOutcome {
  bool verified = false;
  std::string summary_json;
};
VerifyOutcome verify_report(const std::string& report_json);

}  // namespace bf

#endif
