#include "orbit5gc/trace.hpp"

#include <fstream>
#include <stdexcept>

namespace orbit5gc {

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string Tracer::serialize() const {
    std::string out;
    for (const auto& r : records_) {
        out += r.dump();
        out += '\n';
    }
    return out;
}

std::uint64_t Tracer::hash() const { return fnv1a64(serialize()); }

void Tracer::write_file(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open trace file for writing: " + path);
    f << serialize();
}

std::string hash_hex(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

}  // namespace orbit5gc
