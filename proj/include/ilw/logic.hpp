#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ilw {

enum class Principle { P, M, M0, R, W };

auto principle_name(Principle p) -> std::string_view;
auto parse_principle(std::string_view s) -> Principle;
auto all_principles() -> const std::vector<Principle>&;

// IL extended by a set of principles, e.g. "IL", "ILW", "ILM0", "ILWP".
class Logic {
public:
    Logic() = default;
    static auto parse(std::string_view name) -> Logic;
    static auto with(std::vector<Principle> ps) -> Logic;

    auto has(Principle p) const -> bool { return (bits_ >> static_cast<unsigned>(p)) & 1U; }
    auto principles() const -> std::vector<Principle>;
    auto name() const -> std::string;

    friend auto operator==(const Logic& a, const Logic& b) -> bool { return a.bits_ == b.bits_; }

private:
    unsigned bits_ = 0;
};

}  // namespace ilw
