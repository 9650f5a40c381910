#include "oapsim/field.hpp"

#include <stdexcept>

namespace oapsim {

namespace {

// Carry-less polynomial multiply reduced mod p. Used only to build tables.
std::uint8_t poly_mul(std::uint8_t a, std::uint8_t b, std::uint16_t p) {
    std::uint16_t acc = 0;
    std::uint16_t x = a;
    while (b) {
        if (b & 1) acc ^= x;
        x <<= 1;
        if (x & 0x100) x ^= p;
        b = static_cast<std::uint8_t>(b >> 1);
    }
    return static_cast<std::uint8_t>(acc);
}

// Degree of a polynomial bitmask.
int poly_deg(std::uint32_t p) {
    int d = -1;
    while (p) {
        ++d;
        p >>= 1;
    }
    return d;
}

// Remainder of polynomial division over GF(2).
std::uint32_t poly_mod(std::uint32_t a, std::uint32_t m) {
    int dm = poly_deg(m);
    int da = poly_deg(a);
    while (da >= dm) {
        a ^= m << (da - dm);
        da = poly_deg(a);
    }
    return a;
}

} // namespace

bool poly_is_irreducible(std::uint16_t p) {
    if (poly_deg(p) != 8) return false;
    // A degree-8 polynomial is irreducible iff no factor of degree <= 4.
    for (std::uint32_t f = 2; f < 32; ++f) {
        if (poly_deg(f) < 1) continue;
        if (poly_mod(p, f) == 0) return false;
    }
    return true;
}

void FieldSpec::validate() const {
    if (order != 2 && order != 256)
        throw std::invalid_argument("field order must be 2 or 256");
    if (order == 256 && !poly_is_irreducible(poly))
        throw std::invalid_argument("reduction polynomial is not degree-8 irreducible");
}

Field::Field(FieldSpec spec, MulTableKind kind) : spec_(spec), kind_(kind) {
    spec_.validate();
    if (spec_.is_gf2()) return;

    log_.assign(256, 0);
    exp_.assign(512, 0);
    inv_.assign(256, 0);

    // 0x03 (x+1) generates the multiplicative group for the common
    // irreducible polynomials; fall back to scanning if it does not.
    std::uint8_t gen = 0;
    for (std::uint16_t cand = 2; cand < 256; ++cand) {
        std::uint8_t x = 1;
        int order = 0;
        do {
            x = poly_mul(x, static_cast<std::uint8_t>(cand), spec_.poly);
            ++order;
        } while (x != 1 && order <= 255);
        if (order == 255) {
            gen = static_cast<std::uint8_t>(cand);
            break;
        }
    }
    if (gen == 0) throw std::invalid_argument("no generator found; polynomial not irreducible?");

    std::uint8_t x = 1;
    for (int i = 0; i < 255; ++i) {
        exp_[i] = x;
        log_[x] = static_cast<std::uint8_t>(i);
        x = poly_mul(x, gen, spec_.poly);
    }
    for (int i = 255; i < 512; ++i) exp_[i] = exp_[i % 255];

    for (int a = 1; a < 256; ++a)
        inv_[a] = exp_[255 - log_[a]];

    if (kind_ == MulTableKind::Full) {
        full_.assign(65536, 0);
        for (int a = 0; a < 256; ++a)
            for (int b = 0; b < 256; ++b)
                full_[static_cast<std::size_t>(a) * 256 + b] =
                    poly_mul(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b), spec_.poly);
    }
}

FieldElement Field::mul(FieldElement a, FieldElement b) const {
    if (spec_.is_gf2()) return static_cast<FieldElement>(a & b);
    if (kind_ == MulTableKind::Full)
        return full_[static_cast<std::size_t>(a) * 256 + b];
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
}

FieldElement Field::inv(FieldElement a) const {
    if (a == 0) throw std::domain_error("division by zero in GF(q)");
    if (spec_.is_gf2()) return 1;
    return inv_[a];
}

std::size_t Field::table_bytes() const {
    return log_.size() + exp_.size() + inv_.size() + full_.size();
}

} // namespace oapsim
