#include "dpsi/wire.hpp"

#include <cstring>
#include <fstream>

namespace dpsi {

std::string_view to_string(MatrixKind k) {
    switch (k) {
        case MatrixKind::o_additive: return "o_additive";
        case MatrixKind::o_multiplicative: return "o_multiplicative";
        case MatrixKind::q: return "q";
        case MatrixKind::q_prime: return "q_prime";
        case MatrixKind::q_dprime: return "q_dprime";
        case MatrixKind::t: return "t";
    }
    return "?";
}

std::uint8_t payload_type(const Payload& p) { return static_cast<std::uint8_t>(p.index() + 1); }

std::string_view payload_name(const Payload& p) {
    static constexpr std::string_view names[] = {"Outsource",      "StartRequest", "StartRequestWithKey",
                                                 "DelegationToCloud", "DelegationKeyToCloud", "QToB",
                                                 "CloudResultImproved", "CloudResultEO"};
    return names[p.index()];
}

namespace {

constexpr std::uint8_t kMessageMagic[4] = {'E', 'P', 'S', 'I'};
constexpr std::uint8_t kParamsMagic[4] = {'E', 'P', 'S', 'P'};
constexpr std::uint8_t kTranscriptMagic[4] = {'E', 'P', 'S', 'T'};

class Writer {
public:
    void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
    void u8(std::uint8_t v) { out_.push_back(v); }
    void be(u64 v, unsigned width) {
        for (unsigned i = 0; i < width; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * (width - 1 - i))));
    }
    void u32(std::uint32_t v) { be(v, 4); }
    void u64v(u64 v) { be(v, 8); }
    void str(const std::string& s) {
        if (s.size() > 0xffff) throw ParameterError("string too long for the wire format");
        be(s.size(), 2);
        bytes({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
    }
    std::size_t size() const { return out_.size(); }
    std::vector<std::uint8_t>& buffer() { return out_; }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in, std::string_view what) : in_(in), what_(what) {}

    std::span<const std::uint8_t> bytes(std::size_t n) {
        if (in_.size() - pos_ < n) throw FormatError(std::string(what_) + ": truncated input");
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::uint8_t u8() { return bytes(1)[0]; }
    u64 be(unsigned width) {
        u64 v = 0;
        for (auto b : bytes(width)) v = v << 8 | b;
        return v;
    }
    std::uint32_t u32() { return static_cast<std::uint32_t>(be(4)); }
    u64 u64v() { return be(8); }
    std::string str() {
        auto n = be(2);
        auto b = bytes(n);
        return std::string(b.begin(), b.end());
    }
    void magic(const std::uint8_t (&m)[4]) {
        auto b = bytes(4);
        if (std::memcmp(b.data(), m, 4) != 0) throw FormatError(std::string(what_) + ": bad magic");
        if (u8() != kWireVersion) throw FormatError(std::string(what_) + ": unsupported version");
    }
    bool done() const { return pos_ == in_.size(); }
    void expect_done() const {
        if (!done()) throw FormatError(std::string(what_) + ": trailing bytes");
    }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
    std::string_view what_;
};

Party read_party(Reader& r) {
    auto v = r.u8();
    if (v != 'A' && v != 'B' && v != 'C') throw FormatError("unknown party id byte " + std::to_string(v));
    return static_cast<Party>(v);
}

void write_matrix(Writer& w, const BlindedMatrix& m, const PrimeField& field) {
    if (m.m.modulus() != field.modulus()) throw ParameterError("matrix belongs to a different field");
    w.u8(static_cast<std::uint8_t>(m.kind));
    w.u32(static_cast<std::uint32_t>(m.m.rows()));
    w.u32(static_cast<std::uint32_t>(m.m.cols()));
    const unsigned width = field.byte_width();
    w.u8(static_cast<std::uint8_t>(width));
    for (u64 v : m.m.data()) w.be(v, width);
}

BlindedMatrix read_matrix(Reader& r, const PrimeField& field) {
    auto kind = r.u8();
    if (kind < 1 || kind > 6) throw FormatError("unknown matrix kind " + std::to_string(kind));
    std::size_t rows = r.u32();
    std::size_t cols = r.u32();
    unsigned width = r.u8();
    if (width != field.byte_width()) throw FormatError("matrix element width does not match the field");
    BlindedMatrix out{static_cast<MatrixKind>(kind), FieldMatrix(rows, cols, field.modulus())};
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            u64 v = r.be(width);
            if (v >= field.modulus()) throw FormatError("matrix element outside [0, p)");
            out.m.raw(i, j) = v;
        }
    return out;
}

void write_key(Writer& w, const Key& k) { w.bytes(k.bytes()); }

Key read_key(Reader& r, KeyRole role) {
    Key::Bytes b;
    auto s = r.bytes(Key::kSize);
    std::memcpy(b.data(), s.data(), Key::kSize);
    return Key(b, role);
}

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

nlohmann::json matrix_json(const BlindedMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < m.m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (u64 v : m.m.row(r)) row.push_back(std::to_string(v));
        rows.push_back(std::move(row));
    }
    return {{"kind", to_string(m.kind)}, {"rows", m.m.rows()}, {"cols", m.m.cols()}, {"values", std::move(rows)}};
}

nlohmann::json key_json(const Key& k, bool reveal) {
    return reveal ? nlohmann::json(k.hex()) : nlohmann::json("<redacted 16 bytes>");
}

}  // namespace

std::vector<std::uint8_t> encode_message(const Message& m, const PrimeField& field) {
    Writer body;
    std::visit(Overloaded{
                   [&](const Outsource& p) {
                       body.u8(static_cast<std::uint8_t>(p.party));
                       write_matrix(body, p.o, field);
                   },
                   [&](const StartRequest& p) { body.u8(static_cast<std::uint8_t>(p.b_id)); },
                   [&](const StartRequestWithKey& p) {
                       body.u8(static_cast<std::uint8_t>(p.b_id));
                       write_key(body, p.mk_b);
                   },
                   [&](const DelegationToCloud& p) {
                       body.u8(static_cast<std::uint8_t>(p.a_id));
                       body.u8(static_cast<std::uint8_t>(p.b_id));
                       write_matrix(body, p.q, field);
                   },
                   [&](const DelegationKeyToCloud& p) {
                       body.u8(static_cast<std::uint8_t>(p.a_id));
                       body.u8(static_cast<std::uint8_t>(p.b_id));
                       write_key(body, p.tk);
                   },
                   [&](const QToB& p) { write_matrix(body, p.q, field); },
                   [&](const CloudResultImproved& p) {
                       write_matrix(body, p.q_prime, field);
                       write_matrix(body, p.q_dprime, field);
                   },
                   [&](const CloudResultEO& p) { write_matrix(body, p.t, field); },
               },
               m.payload);
    Writer w;
    w.bytes(kMessageMagic);
    w.u8(kWireVersion);
    w.u8(payload_type(m.payload));
    w.u8(static_cast<std::uint8_t>(m.from));
    w.u8(static_cast<std::uint8_t>(m.to));
    if (body.size() > 0xffffffffu) throw ParameterError("message body too large");
    w.u32(static_cast<std::uint32_t>(body.size()));
    w.bytes(body.buffer());
    return w.take();
}

Message decode_message(std::span<const std::uint8_t> bytes, const PrimeField& field) {
    Reader r(bytes, "message");
    r.magic(kMessageMagic);
    auto type = r.u8();
    Party from = read_party(r);
    Party to = read_party(r);
    std::size_t len = r.u32();
    Reader b(r.bytes(len), "message body");
    r.expect_done();
    Payload payload;
    switch (type) {
        case 1: {
            Party party = read_party(b);
            payload = Outsource{party, read_matrix(b, field)};
            break;
        }
        case 2: payload = StartRequest{read_party(b)}; break;
        case 3: {
            Party id = read_party(b);
            payload = StartRequestWithKey{id, read_key(b, KeyRole::master_b)};
            break;
        }
        case 4: {
            Party a = read_party(b);
            Party bb = read_party(b);
            payload = DelegationToCloud{a, bb, read_matrix(b, field)};
            break;
        }
        case 5: {
            Party a = read_party(b);
            Party bb = read_party(b);
            payload = DelegationKeyToCloud{a, bb, read_key(b, KeyRole::tk)};
            break;
        }
        case 6: payload = QToB{read_matrix(b, field)}; break;
        case 7: {
            auto q1 = read_matrix(b, field);
            payload = CloudResultImproved{std::move(q1), read_matrix(b, field)};
            break;
        }
        case 8: payload = CloudResultEO{read_matrix(b, field)}; break;
        default: throw FormatError("unknown payload type " + std::to_string(type));
    }
    b.expect_done();
    return Message{from, to, std::move(payload)};
}

nlohmann::json to_json(const Message& m, bool reveal_keys) {
    nlohmann::json j{{"from", to_string(m.from)}, {"to", to_string(m.to)}, {"type", payload_name(m.payload)}};
    std::visit(Overloaded{
                   [&](const Outsource& p) {
                       j["party"] = to_string(p.party);
                       j["o"] = matrix_json(p.o);
                   },
                   [&](const StartRequest& p) { j["b_id"] = to_string(p.b_id); },
                   [&](const StartRequestWithKey& p) {
                       j["b_id"] = to_string(p.b_id);
                       j["mk_b"] = key_json(p.mk_b, reveal_keys);
                   },
                   [&](const DelegationToCloud& p) {
                       j["a_id"] = to_string(p.a_id);
                       j["b_id"] = to_string(p.b_id);
                       j["q"] = matrix_json(p.q);
                   },
                   [&](const DelegationKeyToCloud& p) {
                       j["a_id"] = to_string(p.a_id);
                       j["b_id"] = to_string(p.b_id);
                       j["tk"] = key_json(p.tk, reveal_keys);
                   },
                   [&](const QToB& p) { j["q"] = matrix_json(p.q); },
                   [&](const CloudResultImproved& p) {
                       j["q_prime"] = matrix_json(p.q_prime);
                       j["q_dprime"] = matrix_json(p.q_dprime);
                   },
                   [&](const CloudResultEO& p) { j["t"] = matrix_json(p.t); },
               },
               m.payload);
    return j;
}

std::vector<std::uint8_t> encode_params(const PublicParams& params) {
    Writer w;
    w.bytes(kParamsMagic);
    w.u8(kWireVersion);
    const unsigned width = params.field.byte_width();
    w.u8(static_cast<std::uint8_t>(width));
    w.u64v(params.field.modulus());
    w.u64v(params.c);
    w.u64v(params.table.h);
    w.u64v(params.table.d);
    w.u64v(params.table.n);
    w.u8(static_cast<std::uint8_t>(params.enc.u));
    w.u8(static_cast<std::uint8_t>(params.enc.t));
    w.u64v(params.enc.tag);
    w.str(params.hash_spec);
    w.str(params.prf_spec);
    if (params.xs.size() != params.table.n) throw ParameterError("evaluation vector length differs from n");
    for (auto x : params.xs) w.be(x.value(), width);
    return w.take();
}

PublicParams decode_params(std::span<const std::uint8_t> bytes) {
    Reader r(bytes, "public parameters");
    r.magic(kParamsMagic);
    unsigned width = r.u8();
    PublicParams p;
    try {
        p.field = PrimeField(r.u64v());
    } catch (const ParameterError& e) {
        throw FormatError(std::string("public parameters: ") + e.what());
    }
    if (width != p.field.byte_width()) throw FormatError("public parameters: element width does not match the field");
    p.c = r.u64v();
    p.table.h = r.u64v();
    p.table.d = r.u64v();
    p.table.n = r.u64v();
    p.enc.u = r.u8();
    p.enc.t = r.u8();
    p.enc.tag = r.u64v();
    p.hash_spec = r.str();
    p.prf_spec = r.str();
    try {
        p.table.validate();
        p.enc.validate(p.field);
    } catch (const ConfigError& e) {
        throw FormatError(std::string("public parameters: ") + e.what());
    }
    for (std::size_t i = 0; i < p.table.n; ++i) {
        u64 v = r.be(width);
        if (v >= p.field.modulus()) throw FormatError("public parameters: evaluation point outside [0, p)");
        p.xs.push_back(FieldElement::raw(v, p.field.modulus()));
    }
    r.expect_done();
    return p;
}

std::vector<std::uint8_t> encode_matrix(const BlindedMatrix& m, const PrimeField& field) {
    Writer w;
    write_matrix(w, m, field);
    return w.take();
}

BlindedMatrix decode_matrix(std::span<const std::uint8_t> bytes, const PrimeField& field) {
    Reader r(bytes, "matrix");
    auto m = read_matrix(r, field);
    r.expect_done();
    return m;
}

const TranscriptEntry& Transcript::append(const Message& m, const PrimeField& field) {
    return append_bytes(encode_message(m, field), field);
}

const TranscriptEntry& Transcript::append_bytes(std::vector<std::uint8_t> bytes, const PrimeField& field) {
    TranscriptEntry e;
    e.seq = static_cast<std::uint32_t>(entries_.size());
    e.message = decode_message(bytes, field);
    e.bytes = std::move(bytes);
    entries_.push_back(std::move(e));
    return entries_.back();
}

std::size_t Transcript::total_bytes() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.bytes.size();
    return n;
}

std::vector<std::uint8_t> encode_transcript_file(const PublicParams& params, const Transcript& t) {
    Writer w;
    w.bytes(kTranscriptMagic);
    w.u8(kWireVersion);
    auto p = encode_params(params);
    w.u32(static_cast<std::uint32_t>(p.size()));
    w.bytes(p);
    w.u32(static_cast<std::uint32_t>(t.size()));
    for (const auto& e : t.entries()) {
        w.u32(e.seq);
        w.u32(static_cast<std::uint32_t>(e.bytes.size()));
        w.bytes(e.bytes);
    }
    return w.take();
}

std::pair<PublicParams, Transcript> decode_transcript_file(std::span<const std::uint8_t> bytes) {
    Reader r(bytes, "transcript");
    r.magic(kTranscriptMagic);
    auto plen = r.u32();
    PublicParams params = decode_params(r.bytes(plen));
    auto count = r.u32();
    Transcript t;
    for (std::uint32_t i = 0; i < count; ++i) {
        auto seq = r.u32();
        if (seq != i) throw FormatError("transcript: sequence numbers out of order");
        auto len = r.u32();
        auto b = r.bytes(len);
        t.append_bytes(std::vector<std::uint8_t>(b.begin(), b.end()), params.field);
    }
    r.expect_done();
    return {std::move(params), std::move(t)};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace dpsi
