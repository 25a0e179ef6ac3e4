#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hkv {

enum class errc {
    not_cyclic,
    overflow,
    invalid_argument,
    salie_unavailable,
    lift_convention_uncalibrated,
    no_convention_matches,
    pole_at_non_positive_integer,
    pole_hit,
    tail_bound_exceeds_tolerance,
    fit_failed,
    trivial_character,
    mode_unavailable,
    side_illegal_at_s,
    identity_violated,
    config_invalid,
};

std::string_view errc_name(errc c) noexcept;

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool ok, errc code, const std::string& what) {
    if (!ok) raise(code, what);
}

}  // namespace hkv
