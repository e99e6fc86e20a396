#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpsi/matrix.hpp"
#include "dpsi/params.hpp"
#include "dpsi/prf.hpp"

namespace dpsi {

enum class MatrixKind : std::uint8_t { o_additive = 1, o_multiplicative = 2, q = 3, q_prime = 4, q_dprime = 5, t = 6 };

std::string_view to_string(MatrixKind k);

struct BlindedMatrix {
    MatrixKind kind = MatrixKind::q;
    FieldMatrix m;

    bool operator==(const BlindedMatrix&) const = default;
};

struct Outsource {
    Party party;
    BlindedMatrix o;
    bool operator==(const Outsource&) const = default;
};
struct StartRequest {
    Party b_id;
    bool operator==(const StartRequest&) const = default;
};
struct StartRequestWithKey {
    Party b_id;
    Key mk_b;
    bool operator==(const StartRequestWithKey&) const = default;
};
struct DelegationToCloud {
    Party a_id;
    Party b_id;
    BlindedMatrix q;
    bool operator==(const DelegationToCloud&) const = default;
};
struct DelegationKeyToCloud {
    Party a_id;
    Party b_id;
    Key tk;
    bool operator==(const DelegationKeyToCloud&) const = default;
};
struct QToB {
    BlindedMatrix q;
    bool operator==(const QToB&) const = default;
};
struct CloudResultImproved {
    BlindedMatrix q_prime;
    BlindedMatrix q_dprime;
    bool operator==(const CloudResultImproved&) const = default;
};
struct CloudResultEO {
    BlindedMatrix t;
    bool operator==(const CloudResultEO&) const = default;
};

using Payload = std::variant<Outsource, StartRequest, StartRequestWithKey, DelegationToCloud, DelegationKeyToCloud, QToB,
                             CloudResultImproved, CloudResultEO>;

/// Payload type byte on the wire: variant index + 1.
std::uint8_t payload_type(const Payload& p);
std::string_view payload_name(const Payload& p);

struct Message {
    Party from;
    Party to;
    Payload payload;

    bool operator==(const Message&) const = default;
};

inline constexpr std::uint8_t kWireVersion = 0x01;

/// "EPSI" | version | type | from | to | be32 body length | body.
/// Matrices: kind | be32 rows | be32 cols | width | rows*cols big-endian elements.
/// Keys: 16 raw bytes. Party ids: one ASCII byte.
std::vector<std::uint8_t> encode_message(const Message& m, const PrimeField& field);
/// Throws FormatError on malformed input or elements outside [0, p).
Message decode_message(std::span<const std::uint8_t> bytes, const PrimeField& field);

/// JSON mirror of a message; element values as decimal strings. Key bytes are
/// redacted unless reveal_keys is set.
nlohmann::json to_json(const Message& m, bool reveal_keys = false);

std::vector<std::uint8_t> encode_params(const PublicParams& params);
PublicParams decode_params(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_matrix(const BlindedMatrix& m, const PrimeField& field);
BlindedMatrix decode_matrix(std::span<const std::uint8_t> bytes, const PrimeField& field);

struct TranscriptEntry {
    std::uint32_t seq = 0;
    Message message;
    std::vector<std::uint8_t> bytes;
};

/// Append-only record of the serialized messages of one session.
class Transcript {
public:
    const TranscriptEntry& append(const Message& m, const PrimeField& field);
    /// Adds pre-serialized bytes; they must decode.
    const TranscriptEntry& append_bytes(std::vector<std::uint8_t> bytes, const PrimeField& field);

    const std::vector<TranscriptEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    std::size_t total_bytes() const;

private:
    std::vector<TranscriptEntry> entries_;
};

/// "EPST" | version | be32 params length | params | be32 count | (be32 seq | be32 length | bytes)*
std::vector<std::uint8_t> encode_transcript_file(const PublicParams& params, const Transcript& t);
std::pair<PublicParams, Transcript> decode_transcript_file(std::span<const std::uint8_t> bytes);

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace dpsi
