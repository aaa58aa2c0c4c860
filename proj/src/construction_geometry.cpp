#include "probrobust/construction_geometry.hpp"

#include "probrobust/errors.hpp"

namespace probrobust {

ConstructionGeometry::ConstructionGeometry(std::size_t centers, Rational rho, bool with_reserve, PointId first_id)
    : centers_(centers), rho_(rho), with_reserve_(with_reserve), first_id_(first_id) {
    if (centers == 0 || centers > max_centers) {
        throw ValidationError("construction needs between 1 and " + std::to_string(max_centers) + " centers");
    }
    if (rho.is_negative() || rho >= Rational(1)) throw ValidationError("construction rho must lie in [0, 1)");

    const Rational free_mass = Rational(1) - rho;
    const Rational half = free_mass / Rational(2);
    if (with_reserve) {
        blocks_.push_back({BlockKind::remainder, 0, half / Rational(2)});
        blocks_.push_back({BlockKind::reserve, 0, half / Rational(2)});
    } else {
        blocks_.push_back({BlockKind::remainder, 0, half});
    }
    if (rho.is_positive()) blocks_.push_back({BlockKind::non_robust, 0, rho});
    first_labeled_atom_ = blocks_.size();
    const Rational per_block = free_mass / Rational(std::int64_t{1} << centers);
    for (std::size_t t = 0; t < labeled_blocks(); ++t) blocks_.push_back({BlockKind::labeled, t, per_block});

    Rational total;
    for (const auto& b : blocks_) total += b.weight;
    if (total != Rational(1)) throw ValidationError("construction block weights do not sum to one");
}

std::optional<std::pair<std::size_t, std::size_t>> ConstructionGeometry::decode_image(PointId id) const noexcept {
    const PointId first_image = first_id_ + centers_;
    if (id < first_image || id >= end_id()) return std::nullopt;
    const PointId offset = id - first_image;
    return std::pair{static_cast<std::size_t>(offset / blocks_.size()), static_cast<std::size_t>(offset % blocks_.size())};
}

std::uint64_t ConstructionGeometry::labeled_bitstring(std::size_t center, std::size_t t) const {
    if (center >= centers_ || t >= labeled_blocks()) throw ValidationError("labeled block out of range");
    std::uint64_t bits = std::uint64_t{1} << center;
    // The other k-1 characters, read left to right, spell t in binary.
    for (std::size_t pos = 0; pos + 1 < centers_; ++pos) {
        const std::size_t j = pos < center ? pos : pos + 1;
        if ((t >> (centers_ - 2 - pos)) & 1u) bits |= std::uint64_t{1} << j;
    }
    return bits;
}

std::size_t ConstructionGeometry::labeled_index(std::size_t center, std::uint64_t bits) const {
    if (center >= centers_ || !((bits >> center) & 1u)) throw ValidationError("bitstring does not own a block at this center");
    std::size_t t = 0;
    for (std::size_t pos = 0; pos + 1 < centers_; ++pos) {
        const std::size_t j = pos < center ? pos : pos + 1;
        t = (t << 1) | ((bits >> j) & 1u);
    }
    return t;
}

int ConstructionGeometry::label(std::uint64_t bits, PointId z) const noexcept {
    const auto decoded = decode_image(z);
    if (!decoded) return 1;
    const auto [center, atom] = *decoded;
    const Block& block = blocks_[atom];
    switch (block.kind) {
        case BlockKind::remainder:
        case BlockKind::reserve: return 1;
        case BlockKind::non_robust: return -1;
        case BlockKind::labeled: {
            if (!((bits >> center) & 1u)) return 1;
            return labeled_index(center, bits) == block.labeled_index ? -1 : 1;
        }
    }
    return 1;
}

bool ConstructionGeometry::operator==(const ConstructionGeometry& other) const noexcept {
    return centers_ == other.centers_ && rho_ == other.rho_ && with_reserve_ == other.with_reserve_ &&
           first_id_ == other.first_id_;
}

std::string ConstructionGeometry::bits_to_string(std::uint64_t bits) const {
    std::string s(centers_, '0');
    for (std::size_t j = 0; j < centers_; ++j) {
        if ((bits >> j) & 1u) s[j] = '1';
    }
    return s;
}

std::uint64_t ConstructionGeometry::bits_from_string(const std::string& text) const {
    if (text.size() != centers_) throw ValidationError("bitstring length must equal the number of centers");
    std::uint64_t bits = 0;
    for (std::size_t j = 0; j < centers_; ++j) {
        if (text[j] == '1') {
            bits |= std::uint64_t{1} << j;
        } else if (text[j] != '0') {
            throw ParseError("bitstring may contain only 0 and 1");
        }
    }
    return bits;
}

}  // namespace probrobust
