#ifndef OAPSIM_FIELD_HPP
#define OAPSIM_FIELD_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace oapsim {

using FieldElement = std::uint8_t;

// Which field a coding scheme operates over. Only GF(2) and GF(2^8) are
// supported; elements of either fit in a byte.
struct FieldSpec {
    std::uint16_t order = 256;               // 2 or 256
    std::uint16_t poly = 0x11B;              // reduction polynomial, GF(256) only

    static FieldSpec gf2() { return FieldSpec{2, 0}; }
    static FieldSpec gf256(std::uint16_t poly = 0x11B) { return FieldSpec{256, poly}; }

    bool is_gf2() const { return order == 2; }
    std::uint32_t bits_per_symbol() const { return order == 2 ? 1u : 8u; }

    bool operator==(const FieldSpec&) const = default;

    // Throws std::invalid_argument if order is unsupported or the
    // polynomial is not degree-8 irreducible over GF(2).
    void validate() const;
};

// True iff p (bitmask, degree 8 expected) is irreducible over GF(2).
bool poly_is_irreducible(std::uint16_t p);

enum class MulTableKind {
    LogAntilog, // 2 x 256-entry tables, multiply via log addition
    Full        // 256 x 256 product table
};

// Precomputed arithmetic tables for one field. For GF(2) everything is
// trivial and no tables are allocated.
class Field {
public:
    explicit Field(FieldSpec spec, MulTableKind kind = MulTableKind::LogAntilog);

    const FieldSpec& spec() const { return spec_; }
    MulTableKind table_kind() const { return kind_; }

    FieldElement add(FieldElement a, FieldElement b) const {
        return static_cast<FieldElement>(a ^ b); // characteristic 2
    }

    FieldElement mul(FieldElement a, FieldElement b) const;

    // Multiplicative inverse; throws std::domain_error for a == 0.
    FieldElement inv(FieldElement a) const;

    // Bytes occupied by the lookup tables (space accounting for reports).
    std::size_t table_bytes() const;

private:
    FieldSpec spec_;
    MulTableKind kind_;
    std::vector<std::uint8_t> log_;   // 256
    std::vector<std::uint8_t> exp_;   // 512, doubled to skip the mod
    std::vector<std::uint8_t> inv_;   // 256
    std::vector<std::uint8_t> full_;  // 65536 when kind == Full
};

} // namespace oapsim

#endif
