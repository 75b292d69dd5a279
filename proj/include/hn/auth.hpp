#pragma once

#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "hn/store.hpp"

namespace hn {

/// 16 random bytes, hex encoded.
std::string new_salt();
/// PBKDF2-HMAC-SHA256 of `password` under `salt`, hex encoded.
std::string hash_password(const std::string& password, const std::string& salt);
/// Constant-time check against a stored user record. Users without a
/// password hash can never log in.
bool verify_password(const User& user, const std::string& password);

/// Server-side session table. Tokens are 128 random bits plus an HMAC tag
/// under the process secret, both base64url encoded.
class Sessions {
public:
    using Clock = std::chrono::steady_clock;

    /// Secret from HN_SECRET, or random per process when unset.
    Sessions();
    explicit Sessions(std::string secret, std::chrono::seconds ttl = std::chrono::hours(12));

    std::string create(const std::string& user);
    /// User of a live session; nullopt for unknown, forged or expired tokens.
    std::optional<std::string> lookup(const std::string& token);
    void revoke(const std::string& token);

private:
    struct Entry {
        std::string user;
        Clock::time_point expires;
    };

    std::string tag(const std::string& nonce) const;

    std::string secret_;
    std::chrono::seconds ttl_;
    std::mutex mu_;
    std::map<std::string, Entry> sessions_;
};

}  // namespace hn
