#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bubblekit/quad.hpp"

namespace bubblekit {

// Exact textual key: doubles are written in hexadecimal floating point.
class CacheKey {
public:
    explicit CacheKey(std::string op);
    CacheKey& add(const std::string& name, double v);
    CacheKey& add(const std::string& name, long v);
    CacheKey& add(const std::string& name, int v) { return add(name, static_cast<long>(v)); }
    CacheKey& add(const std::string& name, const std::string& v);
    const std::string& text() const { return text_; }
    std::uint64_t hash() const;

private:
    std::string text_;
};

std::string hex_double(double v);
double parse_hex_double(const std::string& s);

// One JSON record per key under `dir`; writes go through a temporary file
// and a rename. An empty directory disables caching.
class QuadCache {
public:
    QuadCache() = default;
    explicit QuadCache(std::filesystem::path dir);

    bool enabled() const { return !dir_.empty(); }
    std::optional<std::vector<double>> load(const CacheKey& key) const;
    void store(const CacheKey& key, const std::vector<double>& values) const;

    std::optional<QuadResult> load_result(const CacheKey& key) const;
    void store_result(const CacheKey& key, const QuadResult& r) const;

    // Returns the cached result or computes, stores and returns it.
    template <class Fn>
    QuadResult get_or_compute(const CacheKey& key, Fn&& fn) const {
        if (auto hit = load_result(key)) return *hit;
        QuadResult r = fn();
        store_result(key, r);
        return r;
    }

private:
    std::filesystem::path path_for(const CacheKey& key) const;
    std::filesystem::path dir_;
};

}  // namespace bubblekit
