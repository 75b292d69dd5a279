#include "hn/auth.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>

#include <cstdlib>
#include <vector>

#include "hn/error.hpp"

namespace hn {

namespace {

constexpr int kIterations = 100000;

std::vector<unsigned char> random_bytes(std::size_t n) {
    std::vector<unsigned char> out(n);
    if (RAND_bytes(out.data(), static_cast<int>(n)) != 1) throw Error("random generator failure");
    return out;
}

std::string hex(const unsigned char* p, std::size_t n) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(digits[p[i] >> 4]);
        out.push_back(digits[p[i] & 15]);
    }
    return out;
}

std::string base64url(const unsigned char* p, std::size_t n) {
    static constexpr char table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";
    std::string out;
    std::uint32_t acc = 0;
    int bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        acc = (acc << 8) | p[i];
        bits += 8;
        while (bits >= 6) {
            bits -= 6;
            out.push_back(table[(acc >> bits) & 63]);
        }
    }
    if (bits > 0) out.push_back(table[(acc << (6 - bits)) & 63]);
    return out;
}

}  // namespace

std::string new_salt() {
    auto b = random_bytes(16);
    return hex(b.data(), b.size());
}

std::string hash_password(const std::string& password, const std::string& salt) {
    unsigned char out[32];
    if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()),
                          reinterpret_cast<const unsigned char*>(salt.data()), static_cast<int>(salt.size()),
                          kIterations, EVP_sha256(), sizeof out, out) != 1)
        throw Error("password hashing failed");
    return hex(out, sizeof out);
}

bool verify_password(const User& user, const std::string& password) {
    if (user.hash.empty()) return false;
    std::string h = hash_password(password, user.salt);
    return h.size() == user.hash.size() && CRYPTO_memcmp(h.data(), user.hash.data(), h.size()) == 0;
}

Sessions::Sessions() : ttl_(std::chrono::hours(12)) {
    if (const char* s = std::getenv("HN_SECRET"); s && *s) {
        secret_ = s;
    } else {
        auto b = random_bytes(32);
        secret_.assign(b.begin(), b.end());
    }
}

Sessions::Sessions(std::string secret, std::chrono::seconds ttl) : secret_(std::move(secret)), ttl_(ttl) {}

std::string Sessions::tag(const std::string& nonce) const {
    unsigned char mac[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    HMAC(EVP_sha256(), secret_.data(), static_cast<int>(secret_.size()),
         reinterpret_cast<const unsigned char*>(nonce.data()), nonce.size(), mac, &len);
    return base64url(mac, 16);
}

std::string Sessions::create(const std::string& user) {
    auto b = random_bytes(16);
    std::string nonce = base64url(b.data(), b.size());
    std::string token = nonce + "." + tag(nonce);
    std::lock_guard lock(mu_);
    sessions_[token] = Entry{user, Clock::now() + ttl_};
    return token;
}

std::optional<std::string> Sessions::lookup(const std::string& token) {
    auto dot = token.find('.');
    if (dot == std::string::npos) return std::nullopt;
    std::string expect = tag(token.substr(0, dot));
    std::string given = token.substr(dot + 1);
    if (given.size() != expect.size() || CRYPTO_memcmp(given.data(), expect.data(), given.size()) != 0)
        return std::nullopt;
    std::lock_guard lock(mu_);
    auto it = sessions_.find(token);
    if (it == sessions_.end()) return std::nullopt;
    if (Clock::now() >= it->second.expires) {
        sessions_.erase(it);
        return std::nullopt;
    }
    return it->second.user;
}

void Sessions::revoke(const std::string& token) {
    std::lock_guard lock(mu_);
    sessions_.erase(token);
}

}  // namespace hn
