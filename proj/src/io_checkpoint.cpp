#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>

#include "tvc/io.hpp"

namespace tvc {

namespace {

constexpr char kMagic[4] = {'T', 'A', 'R', 'T'};
constexpr uint32_t kVersion = 1;

uint32_t crc_table_entry(uint32_t i) {
    uint32_t c = i;
    for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    return c;
}

void put_u16(std::vector<unsigned char>& out, uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xFF));
    out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u32(std::vector<unsigned char>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::vector<unsigned char>& out, double v) {
    const uint64_t bits = std::bit_cast<uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>((bits >> (8 * i)) & 0xFF));
}

struct Reader {
    const std::vector<unsigned char>& bytes;
    size_t pos = 0;

    void need(size_t n) const {
        require(pos + n <= bytes.size(), Err::CorruptHeader, "checkpoint truncated");
    }
    uint16_t u16() {
        need(2);
        uint16_t v = uint16_t(bytes[pos]) | uint16_t(bytes[pos + 1]) << 8;
        pos += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t(bytes[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    double f64() {
        need(8);
        uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= uint64_t(bytes[pos + i]) << (8 * i);
        pos += 8;
        return std::bit_cast<double>(bits);
    }
};

}  // namespace

uint32_t crc32(const unsigned char* data, size_t len) {
    static uint32_t table[256];
    static bool ready = false;
    if (!ready) {
        for (uint32_t i = 0; i < 256; ++i) table[i] = crc_table_entry(i);
        ready = true;
    }
    uint32_t c = 0xFFFFFFFFu;
    for (size_t i = 0; i < len; ++i) c = table[(c ^ data[i]) & 0xFF] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

std::vector<unsigned char> encode_checkpoint(const std::vector<Section>& sections) {
    std::vector<unsigned char> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, kVersion);
    for (const auto& s : sections) {
        require(s.name.size() <= 0xFFFF, Err::ShapeMismatch, "section name too long");
        require(s.shape.size() <= 0xFF, Err::ShapeMismatch, "section rank too large");
        size_t count = 1;
        for (int d : s.shape) {
            require(d >= 0, Err::ShapeMismatch, "negative dim");
            count *= size_t(d);
        }
        require(count == s.data.size(), Err::ShapeMismatch,
                "section payload does not match shape: " + s.name);
        put_u16(out, uint16_t(s.name.size()));
        out.insert(out.end(), s.name.begin(), s.name.end());
        out.push_back(static_cast<unsigned char>(s.shape.size()));
        for (int d : s.shape) put_u32(out, uint32_t(d));
        for (double v : s.data) put_f64(out, v);
    }
    put_u32(out, crc32(out.data(), out.size()));
    return out;
}

std::vector<Section> decode_checkpoint(const std::vector<unsigned char>& bytes) {
    require(bytes.size() >= 12, Err::CorruptHeader, "checkpoint too small");
    require(std::memcmp(bytes.data(), kMagic, 4) == 0, Err::CorruptHeader, "bad magic");

    const size_t body = bytes.size() - 4;
    uint32_t stored = 0;
    for (int i = 0; i < 4; ++i) stored |= uint32_t(bytes[body + size_t(i)]) << (8 * i);
    require(crc32(bytes.data(), body) == stored, Err::ChecksumMismatch, "CRC32 mismatch");

    Reader r{bytes, 4};
    const uint32_t version = r.u32();
    require(version == kVersion, Err::VersionUnsupported,
            "unsupported checkpoint version " + std::to_string(version));

    std::vector<Section> sections;
    while (r.pos < body) {
        Section s;
        const uint16_t name_len = r.u16();
        r.need(name_len);
        s.name.assign(reinterpret_cast<const char*>(bytes.data()) + r.pos, name_len);
        r.pos += name_len;
        r.need(1);
        const int rank = bytes[r.pos++];
        size_t count = 1;
        for (int i = 0; i < rank; ++i) {
            const uint32_t d = r.u32();
            s.shape.push_back(int(d));
            count *= d;
        }
        s.data.resize(count);
        for (size_t i = 0; i < count; ++i) s.data[i] = r.f64();
        sections.push_back(std::move(s));
    }
    require(r.pos == body, Err::CorruptHeader, "trailing bytes before CRC");
    return sections;
}

void write_checkpoint_file(const std::vector<Section>& sections, const std::string& path) {
    const auto bytes = encode_checkpoint(sections);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(out.good(), Err::EmptyFile, "cannot write " + tmp);
        out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
        require(out.good(), Err::EmptyFile, "short write to " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::vector<Section> read_checkpoint_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), Err::MissingCheckpoint, "cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return decode_checkpoint(bytes);
}

namespace {

Section scalar(const std::string& name, double v) { return {name, {}, {v}}; }

double take_scalar(const std::map<std::string, const Section*>& by_name, const std::string& key) {
    auto it = by_name.find(key);
    require(it != by_name.end(), Err::CorruptHeader, "missing section " + key);
    require(it->second->data.size() == 1, Err::CorruptHeader, "scalar section expected: " + key);
    return it->second->data[0];
}

std::vector<Section> bundle_sections(const TokenizerBundle& bundle) {
    std::vector<Section> out;
    out.push_back(scalar("meta.kind", 0.0));
    out.push_back(scalar("config.n_tokens", bundle.cfg.n_tokens));
    out.push_back(scalar("config.dim", bundle.cfg.dim));
    out.push_back(scalar("config.heads", bundle.cfg.heads));
    out.push_back(scalar("config.codes", bundle.cfg.codes));
    out.push_back(scalar("config.factor", bundle.cfg.factor));
    out.push_back(scalar("config.segment", bundle.cfg.segment));
    out.push_back(scalar("config.depth", bundle.cfg.depth));
    out.push_back(scalar("config.frozen", bundle.frozen ? 1.0 : 0.0));
    out.push_back(scalar("vis.in_shift", bundle.visual.enc.in_shift));
    out.push_back(scalar("vis.in_scale", bundle.visual.enc.in_scale));
    out.push_back(scalar("temp.in_shift", bundle.temporal.enc.in_shift));
    out.push_back(scalar("temp.in_scale", bundle.temporal.enc.in_scale));
    auto& mutable_bundle = const_cast<TokenizerBundle&>(bundle);
    for (const auto& ref : tensor_refs(mutable_bundle)) {
        Section s;
        s.name = ref.name;
        s.shape = ref.shape;
        s.data.assign(ref.data, ref.data + ref.size);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

void save_bundle(const TokenizerBundle& bundle, const std::string& path) {
    write_checkpoint_file(bundle_sections(bundle), path);
}

uint32_t bundle_digest(const TokenizerBundle& bundle) {
    const auto bytes = encode_checkpoint(bundle_sections(bundle));
    return crc32(bytes.data(), bytes.size());
}

TokenizerBundle load_bundle(const std::string& path) {
    const auto sections = read_checkpoint_file(path);
    std::map<std::string, const Section*> by_name;
    for (const auto& s : sections) by_name[s.name] = &s;

    require(take_scalar(by_name, "meta.kind") == 0.0, Err::UnsupportedFormat,
            "checkpoint does not hold a tokenizer bundle");

    TokenizerBundle bundle;
    bundle.cfg.n_tokens = int(take_scalar(by_name, "config.n_tokens"));
    bundle.cfg.dim = int(take_scalar(by_name, "config.dim"));
    bundle.cfg.heads = int(take_scalar(by_name, "config.heads"));
    bundle.cfg.codes = int(take_scalar(by_name, "config.codes"));
    bundle.cfg.factor = int(take_scalar(by_name, "config.factor"));
    bundle.cfg.segment = int(take_scalar(by_name, "config.segment"));
    bundle.cfg.depth = int(take_scalar(by_name, "config.depth"));
    bundle.cfg.validate();
    bundle.frozen = take_scalar(by_name, "config.frozen") != 0.0;

    bundle.visual = init_autoencoder(bundle.cfg.n_tokens, bundle.cfg.visual_token_dim(),
                                     bundle.cfg.dim, bundle.cfg.depth, 0);
    set_pixel_map(bundle.visual, take_scalar(by_name, "vis.in_shift"),
                  take_scalar(by_name, "vis.in_scale"));
    bundle.temporal = init_autoencoder(bundle.cfg.n_tokens, bundle.cfg.temporal_token_dim(),
                                       bundle.cfg.dim, bundle.cfg.depth, 0);
    set_pixel_map(bundle.temporal, take_scalar(by_name, "temp.in_shift"),
                  take_scalar(by_name, "temp.in_scale"));
    bundle.book = MultiHeadCodebook(bundle.cfg.heads, bundle.cfg.codes,
                                    bundle.cfg.dim / bundle.cfg.heads);

    for (const auto& ref : tensor_refs(bundle)) {
        auto it = by_name.find(ref.name);
        require(it != by_name.end(), Err::CorruptHeader, "missing section " + ref.name);
        require(it->second->data.size() == ref.size, Err::CorruptHeader,
                "section size mismatch: " + ref.name);
        std::memcpy(ref.data, it->second->data.data(), ref.size * sizeof(double));
    }
    return bundle;
}

void save_alignment(const AlignmentModel& model, const std::string& path) {
    std::vector<Section> out;
    out.push_back(scalar("meta.kind", 1.0));
    out.push_back(scalar("config.n_tokens", model.n_tokens));
    out.push_back(scalar("config.heads", model.heads));
    out.push_back(scalar("config.codes", model.codes));
    out.push_back(scalar("config.embed_dim", model.embed_dim));
    out.push_back(
        scalar("config.direction", model.direction == Direction::TemporalToVisual ? 0.0 : 1.0));
    auto& mutable_model = const_cast<AlignmentModel&>(model);
    for (const auto& ref : tensor_refs(mutable_model)) {
        Section s;
        s.name = ref.name;
        s.shape = ref.shape;
        s.data.assign(ref.data, ref.data + ref.size);
        out.push_back(std::move(s));
    }
    write_checkpoint_file(out, path);
}

AlignmentModel load_alignment(const std::string& path) {
    const auto sections = read_checkpoint_file(path);
    std::map<std::string, const Section*> by_name;
    for (const auto& s : sections) by_name[s.name] = &s;

    require(take_scalar(by_name, "meta.kind") == 1.0, Err::UnsupportedFormat,
            "checkpoint does not hold an alignment model");

    const int n = int(take_scalar(by_name, "config.n_tokens"));
    const int m = int(take_scalar(by_name, "config.heads"));
    const int k = int(take_scalar(by_name, "config.codes"));
    const int e = int(take_scalar(by_name, "config.embed_dim"));
    const Direction dir = take_scalar(by_name, "config.direction") == 0.0
                              ? Direction::TemporalToVisual
                              : Direction::VisualToTemporal;

    AlignmentModel model = zeros_alignment(n, m, k, e, dir);
    for (const auto& ref : tensor_refs(model)) {
        auto it = by_name.find(ref.name);
        require(it != by_name.end(), Err::CorruptHeader, "missing section " + ref.name);
        require(it->second->data.size() == ref.size, Err::CorruptHeader,
                "section size mismatch: " + ref.name);
        std::memcpy(ref.data, it->second->data.data(), ref.size * sizeof(double));
    }
    return model;
}

}  // namespace tvc
