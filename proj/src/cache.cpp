#include "bubblekit/cache.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bubblekit {

std::string hex_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double parse_hex_double(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

CacheKey::CacheKey(std::string op) : text_(std::move(op)) {}

CacheKey& CacheKey::add(const std::string& name, double v) {
    text_ += "|" + name + "=" + hex_double(v);
    return *this;
}

CacheKey& CacheKey::add(const std::string& name, long v) {
    text_ += "|" + name + "=" + std::to_string(v);
    return *this;
}

CacheKey& CacheKey::add(const std::string& name, const std::string& v) {
    text_ += "|" + name + "=" + v;
    return *this;
}

std::uint64_t CacheKey::hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text_) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

QuadCache::QuadCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::filesystem::path QuadCache::path_for(const CacheKey& key) const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx.json", static_cast<unsigned long long>(key.hash()));
    return dir_ / buf;
}

std::optional<std::vector<double>> QuadCache::load(const CacheKey& key) const {
    if (!enabled()) return std::nullopt;
    std::ifstream in(path_for(key));
    if (!in) return std::nullopt;
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
    if (!j.contains("key") || j["key"] != key.text()) return std::nullopt;
    std::vector<double> out;
    for (const auto& v : j["values"]) out.push_back(parse_hex_double(v.get<std::string>()));
    return out;
}

void QuadCache::store(const CacheKey& key, const std::vector<double>& values) const {
    if (!enabled()) return;
    nlohmann::json j;
    j["key"] = key.text();
    j["values"] = nlohmann::json::array();
    for (double v : values) j["values"].push_back(hex_double(v));
    auto target = path_for(key);
    auto tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        out << j.dump(1) << "\n";
    }
    std::filesystem::rename(tmp, target);
}

std::optional<QuadResult> QuadCache::load_result(const CacheKey& key) const {
    auto v = load(key);
    if (!v || v->size() != 5) return std::nullopt;
    QuadResult r;
    r.value = (*v)[0];
    r.error_estimate = (*v)[1];
    r.nodes_used = static_cast<long>((*v)[2]);
    r.abs_integral = (*v)[3];
    r.converged = (*v)[4] != 0.0;
    return r;
}

void QuadCache::store_result(const CacheKey& key, const QuadResult& r) const {
    store(key, {r.value, r.error_estimate, static_cast<double>(r.nodes_used), r.abs_integral,
                r.converged ? 1.0 : 0.0});
}

}  // namespace bubblekit
