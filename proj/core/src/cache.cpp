#include "m2dt/cache.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace m2dt {

namespace {
constexpr const char* kOracleVersion = "m2dt-counts-v1";
}

std::string cache_key(const std::string& quiver_sig, const std::string& potential_sig,
                      const DimVector& n, uint32_t p, const std::string& sector,
                      uint32_t value_scale) {
    std::ostringstream os;
    os << kOracleVersion << "|" << quiver_sig << "|" << potential_sig << "|" << to_string(n)
       << "|p" << p << "|" << sector << "|s" << value_scale;
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)fnv1a(os.str()));
    return buf;
}

std::optional<CountVector> cache_get(const std::string& dir, const std::string& key, uint32_t p) {
    std::filesystem::path path = std::filesystem::path(dir) / (key + ".counts");
    std::ifstream in(path);
    if (!in)
        return std::nullopt;
    std::string header, payload, line;
    std::getline(in, header);
    std::ostringstream body;
    std::string checksum;
    while (std::getline(in, line)) {
        if (line.rfind("checksum=", 0) == 0) {
            checksum = line.substr(9);
            break;
        }
        body << line << "\n";
    }
    payload = body.str();
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)fnv1a(payload));
    if (checksum != buf)
        return std::nullopt; // poisoned or truncated entry: recompute
    CountVector v(p);
    std::istringstream rows(payload);
    for (uint32_t t = 0; t < p; ++t) {
        if (!std::getline(rows, line))
            return std::nullopt;
        v.c[t] = Rational(line);
    }
    return v;
}

void cache_put(const std::string& dir, const std::string& key, const CountVector& v) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ostringstream body;
    for (const auto& x : v.c)
        body << x.str() << "\n";
    std::string payload = body.str();
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)fnv1a(payload));
    std::filesystem::path tmp = std::filesystem::path(dir) / (key + ".tmp");
    std::filesystem::path dst = std::filesystem::path(dir) / (key + ".counts");
    {
        std::ofstream out(tmp);
        out << "p=" << v.p << "\n" << payload << "checksum=" << buf << "\n";
    }
    std::filesystem::rename(tmp, dst, ec);
}

} // namespace m2dt
