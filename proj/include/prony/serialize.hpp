#ifndef PRONY_SERIALIZE_HPP
#define PRONY_SERIALIZE_HPP

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "prony/constrained.hpp"
#include "prony/jacobian.hpp"
#include "prony/leaf.hpp"
#include "prony/scaling.hpp"
#include "prony/signal.hpp"

namespace prony {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Malformed or inconsistent input data.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Json to_json(const Signal& signal);
Json to_json(const MomentVector& mu);
Json to_json(const ClusterFrame& frame);
Json to_json(const RegularityParams& params);
/// Flat object; "K3" is omitted when unset.
Json to_json(const ConstantsBundle& constants);
Json to_json(const SampleCloud& cloud);
Json to_json(const WorstCaseReport& report);
Json to_json(const SandwichReport& report);
Json to_json(const NeighborhoodReport& report);
Json to_json(const HausdorffEstimate& estimate);
Json to_json(const ImprovedResult& result);
Json to_json(const SlopeFit& fit);

Signal signal_from_json(const Json& j);
MomentVector moments_from_json(const Json& j);

/// Top-level document: the payload with "schema" prepended.
Json document(const Json& payload);

/// Deterministic text form (two-space indent, trailing newline).
std::string dump(const Json& j);

/// Shortest round-trip decimal for a double.
std::string format_double(double v);

/// Cloud CSV: a_1..a_d, x_1..x_d, mode, mu_0..mu_{2d-1}; with a frame, the
/// model-space coordinates ga_1..ga_d, gx_1..gx_d are appended.
void write_cloud_csv(std::ostream& out, const SampleCloud& cloud, std::size_t d,
                     const std::optional<ClusterFrame>& frame = std::nullopt);

/// Reads a cloud CSV and re-checks every row: the stored signal must
/// reproduce its source moments to 1e-8 (1 + ||mu||).
SampleCloud read_cloud_csv(std::istream& in);

}  // namespace prony

#endif  // PRONY_SERIALIZE_HPP
