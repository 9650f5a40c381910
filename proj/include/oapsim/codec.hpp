#ifndef OAPSIM_CODEC_HPP
#define OAPSIM_CODEC_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oapsim/field.hpp"
#include "oapsim/rng.hpp"

namespace oapsim {

// One page of a program image: k source packets of exactly L bytes each.
struct Page {
    std::uint32_t page_id = 0;
    std::uint32_t k = 0;
    std::uint32_t L = 0;
    std::vector<std::vector<std::uint8_t>> packets;

    // Splits an image into k packets of L bytes, zero-padding the tail.
    static Page from_image(std::uint32_t page_id, std::uint32_t k, std::uint32_t L,
                           const std::vector<std::uint8_t>& image);

    static Page random(std::uint32_t page_id, std::uint32_t k, std::uint32_t L, Rng& rng);

    bool operator==(const Page&) const = default;
};

// Coding coefficient vector of length k. GF(2) vectors are bit-packed,
// 64 coefficients per word, so row addition is word-wise XOR.
class CoefficientVector {
public:
    CoefficientVector() = default;
    CoefficientVector(FieldSpec field, std::uint32_t k);

    const FieldSpec& field() const { return field_; }
    std::uint32_t size() const { return k_; }

    FieldElement get(std::uint32_t i) const;
    void set(std::uint32_t i, FieldElement v);

    bool is_zero() const;
    // Index of the first nonzero coefficient, if any.
    std::optional<std::uint32_t> leading() const;

    // this += factor * other
    void add_scaled(const CoefficientVector& other, FieldElement factor, const Field& f);
    // this *= factor
    void scale(FieldElement factor, const Field& f);

    // GF(2): "1010..."; GF(256): lowercase hex, two chars per coefficient.
    std::string to_string() const;

    bool operator==(const CoefficientVector&) const = default;

private:
    FieldSpec field_;
    std::uint32_t k_ = 0;
    std::vector<std::uint64_t> bits_;  // GF(2)
    std::vector<std::uint8_t> bytes_;  // GF(256)
};

struct Codeword {
    std::uint32_t page_id = 0;
    CoefficientVector coeffs;
    std::vector<std::uint8_t> payload;
};

// dst += factor * src, byte-wise over the payload.
void payload_add_scaled(std::vector<std::uint8_t>& dst,
                        const std::vector<std::uint8_t>& src,
                        FieldElement factor, const Field& f);

enum class AbsorbResult { Innovative, Redundant };

// Separable operation counters for the k^3 (coefficient) and k^2·L
// (payload) terms of the decoding cost model.
struct RowOpCounters {
    std::uint64_t coeff_ops = 0;
    std::uint64_t payload_ops = 0;
    std::uint64_t total() const { return coeff_ops + payload_ops; }
};

struct InsufficientRank : std::runtime_error {
    std::uint32_t rank;
    explicit InsufficientRank(std::uint32_t r)
        : std::runtime_error("insufficient rank: " + std::to_string(r)), rank(r) {}
};

// Incremental triangularizing decoder. Absorb keeps the coefficient matrix
// in strict row-echelon form via forward elimination only; decode performs
// the deferred back-substitution. Relays recode straight from the echelon
// rows without ever decoding.
class DecoderState {
public:
    DecoderState(const Field& field, std::uint32_t page_id, std::uint32_t k, std::uint32_t L);

    std::uint32_t k() const { return k_; }
    std::uint32_t L() const { return L_; }
    std::uint32_t page_id() const { return page_id_; }
    std::uint32_t rank() const { return static_cast<std::uint32_t>(rows_.size()); }
    bool full_rank() const { return rank() == k_; }
    std::uint64_t redundant_count() const { return redundant_; }
    const RowOpCounters& row_ops() const { return ops_; }

    // Seeds the state with the source page itself (identity rows).
    void seed_from_page(const Page& page);

    AbsorbResult absorb(const Codeword& cw);

    // Requires full rank; throws InsufficientRank otherwise.
    Page decode();

    // Random linear combination of the stored rows. Throws std::logic_error
    // at rank 0.
    Codeword recode(Rng& rng) const;

    struct Row {
        CoefficientVector coeffs;
        std::vector<std::uint8_t> payload;
        std::uint32_t lead = 0;
    };
    const std::vector<Row>& rows() const { return rows_; }

private:
    const Field* field_;
    std::uint32_t page_id_;
    std::uint32_t k_;
    std::uint32_t L_;
    std::vector<Row> rows_; // sorted by strictly increasing lead column
    std::uint64_t redundant_ = 0;
    RowOpCounters ops_;
};

// Degree distribution for codeword generation: dense uniform RLC, or the
// sparse robust-soliton profile used by the LT-style baseline.
struct DegreeDistribution {
    enum class Kind { UniformRlc, SparseLt };
    Kind kind = Kind::UniformRlc;
    double c = 0.1;        // robust soliton parameters
    double delta = 0.5;

    static DegreeDistribution uniform_rlc() { return {}; }
    static DegreeDistribution sparse_lt(double c = 0.1, double delta = 0.5) {
        return {Kind::SparseLt, c, delta};
    }
};

// Robust soliton probability mass over degrees 1..k.
std::vector<double> robust_soliton_pmf(std::uint32_t k, double c, double delta);

// Degree in [1, k]. UniformRlc always returns k (dense).
std::uint32_t sample_degree(const DegreeDistribution& dist, std::uint32_t k, Rng& rng);

// Draws a coefficient vector per the distribution (all-zero rejected for
// dense RLC) and forms the corresponding codeword over the page.
Codeword encode(const Page& page, Rng& rng, const DegreeDistribution& dist, const Field& field);

// Monte Carlo mean of extra codewords received beyond k before a decoder
// fed uniform-random (nonzero) codewords reaches full rank.
double expected_overhead_trial(const Field& field, std::uint32_t k,
                               std::uint32_t trials, Rng& rng);

} // namespace oapsim

#endif
