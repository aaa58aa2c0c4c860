#pragma once

#include "probrobust/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace probrobust {

using PointId = std::uint64_t;

/// Discrete realization of the loss-class blow-up instance. There are k
/// centers; every center owns one image point per atom, and the atoms are
/// shared across centers (atom a maps center i to image(i, a)). Per center the
/// atoms form blocks:
///   remainder   weight (1 - rho) / 2, always labeled +1
///   reserve     optional; splits the remainder in half, labeled +1
///   non_robust  weight rho (absent when rho = 0), labeled -1 by every h_b
///   labeled t   2^(k-1) blocks of weight (1 - rho) / 2^k; block t of center i
///               belongs to the t-th bitstring (lexicographic) with b_i = 1
/// h_b labels block t of center i with -1 iff that block belongs to b.
class ConstructionGeometry {
public:
    enum class BlockKind { remainder, reserve, non_robust, labeled };

    struct Block {
        BlockKind kind;
        std::size_t labeled_index;  // meaningful for labeled blocks only
        Rational weight;
    };

    static constexpr std::size_t max_centers = 20;

    /// Throws ValidationError for k outside [1, max_centers] or rho outside [0, 1).
    ConstructionGeometry(std::size_t centers, Rational rho, bool with_reserve = false, PointId first_id = 0);

    [[nodiscard]] std::size_t centers() const noexcept { return centers_; }
    [[nodiscard]] const Rational& rho() const noexcept { return rho_; }
    [[nodiscard]] bool with_reserve() const noexcept { return with_reserve_; }
    [[nodiscard]] PointId first_id() const noexcept { return first_id_; }
    [[nodiscard]] std::size_t labeled_blocks() const noexcept { return std::size_t{1} << (centers_ - 1); }
    [[nodiscard]] std::size_t atom_count() const noexcept { return blocks_.size(); }
    [[nodiscard]] const std::vector<Block>& blocks() const noexcept { return blocks_; }

    [[nodiscard]] PointId center_id(std::size_t i) const noexcept { return first_id_ + i; }
    [[nodiscard]] PointId image_id(std::size_t center, std::size_t atom) const noexcept {
        return first_id_ + centers_ + center * blocks_.size() + atom;
    }
    /// One past the largest id this geometry uses.
    [[nodiscard]] PointId end_id() const noexcept { return image_id(centers_, 0); }

    /// (center, atom) for an image id, nullopt otherwise.
    [[nodiscard]] std::optional<std::pair<std::size_t, std::size_t>> decode_image(PointId id) const noexcept;

    /// Bit j of the mask is b_j (center j); center 0 is the leading character
    /// of the lexicographic order.
    [[nodiscard]] std::uint64_t labeled_bitstring(std::size_t center, std::size_t t) const;
    [[nodiscard]] std::size_t labeled_index(std::size_t center, std::uint64_t bits) const;

    /// h_b(z). Centers, remainder/reserve images and foreign ids are +1.
    [[nodiscard]] int label(std::uint64_t bits, PointId z) const noexcept;

    [[nodiscard]] bool operator==(const ConstructionGeometry& other) const noexcept;

    [[nodiscard]] std::string bits_to_string(std::uint64_t bits) const;
    [[nodiscard]] std::uint64_t bits_from_string(const std::string& text) const;

private:
    std::size_t centers_;
    Rational rho_;
    bool with_reserve_;
    PointId first_id_;
    std::vector<Block> blocks_;
    std::size_t first_labeled_atom_ = 0;
};

}  // namespace probrobust
