#include "specml/checkpoint.hpp"

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace specml {

namespace {

constexpr char kMagic[8] = {'S', 'P', 'E', 'C', 'M', 'L', 'C', 'K'};
constexpr uint32_t kVersion = 1;

void append_u32(std::string& buf, uint32_t v) {
    buf.append(reinterpret_cast<const char*>(&v), sizeof(v));
}

void append_f64(std::string& buf, const double* v, size_t n) {
    buf.append(reinterpret_cast<const char*>(v), n * sizeof(double));
}

class Reader {
  public:
    Reader(const char* data, size_t size) : data_(data), size_(size) {}

    uint32_t u32() {
        uint32_t v;
        take(reinterpret_cast<char*>(&v), sizeof(v));
        return v;
    }
    std::string bytes(size_t n) {
        std::string s(n, '\0');
        take(s.data(), n);
        return s;
    }
    void f64(double* out, size_t n) {
        take(reinterpret_cast<char*>(out), n * sizeof(double));
    }
    bool done() const { return pos_ == size_; }

  private:
    void take(char* out, size_t n) {
        if (pos_ + n > size_) throw std::runtime_error("checkpoint corrupt");
        std::memcpy(out, data_ + pos_, n);
        pos_ += n;
    }
    const char* data_;
    size_t size_;
    size_t pos_ = 0;
};

uint32_t payload_crc(const std::string& payload) {
    return static_cast<uint32_t>(
        crc32(0, reinterpret_cast<const Bytef*>(payload.data()),
              static_cast<uInt>(payload.size())));
}

}  // namespace

const Tensor* Checkpoint::find(const std::string& name) const {
    for (const auto& [n, t] : arrays)
        if (n == name) return &t;
    return nullptr;
}

void save_checkpoint(
    const std::string& path, const std::string& config_json,
    const std::vector<std::pair<std::string, const Tensor*>>& arrays) {
    std::string payload;
    append_u32(payload, kVersion);
    append_u32(payload, static_cast<uint32_t>(config_json.size()));
    payload += config_json;
    append_u32(payload, static_cast<uint32_t>(arrays.size()));
    for (const auto& [name, tensor] : arrays) {
        append_u32(payload, static_cast<uint32_t>(name.size()));
        payload += name;
        append_u32(payload, static_cast<uint32_t>(tensor->dims));
        append_u32(payload, static_cast<uint32_t>(tensor->nx));
        append_u32(payload, static_cast<uint32_t>(tensor->ny));
        append_u32(payload, static_cast<uint32_t>(tensor->channels));
        append_f64(payload, tensor->data.data(), tensor->data.size());
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out.write(kMagic, sizeof(kMagic));
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    uint32_t crc = payload_crc(payload);
    out.write(reinterpret_cast<const char*>(&crc), sizeof(crc));
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
    std::string raw((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());

    if (raw.size() < sizeof(kMagic) + sizeof(uint32_t) ||
        std::memcmp(raw.data(), kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("not a checkpoint file");

    std::string payload =
        raw.substr(sizeof(kMagic), raw.size() - sizeof(kMagic) - sizeof(uint32_t));
    uint32_t stored_crc;
    std::memcpy(&stored_crc, raw.data() + raw.size() - sizeof(uint32_t),
                sizeof(uint32_t));
    if (stored_crc != payload_crc(payload))
        throw std::runtime_error("checkpoint corrupt");

    Reader r(payload.data(), payload.size());
    uint32_t version = r.u32();
    if (version != kVersion)
        throw std::runtime_error("unsupported checkpoint version");

    Checkpoint ck;
    ck.config_json = r.bytes(r.u32());
    uint32_t count = r.u32();
    for (uint32_t i = 0; i < count; ++i) {
        std::string name = r.bytes(r.u32());
        uint32_t dims = r.u32(), nx = r.u32(), ny = r.u32(), channels = r.u32();
        Tensor t(static_cast<int>(dims), static_cast<int>(nx),
                 static_cast<int>(ny), static_cast<int>(channels));
        r.f64(t.data.data(), t.data.size());
        ck.arrays.emplace_back(std::move(name), std::move(t));
    }
    if (!r.done()) throw std::runtime_error("checkpoint corrupt");
    return ck;
}

}  // namespace specml
