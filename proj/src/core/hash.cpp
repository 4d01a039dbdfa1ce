#include "core/hash.hpp"

#include <fstream>

#include "core/error.hpp"

namespace selflearn {

std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SlfError("cannot open file for checksumming: " + path);
    std::uint64_t h = 1469598103934665603ULL;
    char buf[65536];
    while (in) {
        in.read(buf, sizeof(buf));
        const std::streamsize got = in.gcount();
        if (got > 0) h = fnv1a64(buf, std::size_t(got), h);
    }
    return hex64(h);
}

} // namespace selflearn
