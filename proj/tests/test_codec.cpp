#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oapsim/codec.hpp"

#include <cmath>
#include <cstring>
#include <map>

using namespace oapsim;

namespace {

// Reference GF(2) rank by plain Gaussian elimination over bool rows.
std::uint32_t gf2_rank(std::vector<std::vector<int>> m) {
    std::uint32_t rank = 0;
    std::uint32_t cols = m.empty() ? 0 : static_cast<std::uint32_t>(m[0].size());
    for (std::uint32_t col = 0; col < cols && rank < m.size(); ++col) {
        std::size_t pivot = rank;
        while (pivot < m.size() && !m[pivot][col]) ++pivot;
        if (pivot == m.size()) continue;
        std::swap(m[pivot], m[rank]);
        for (std::size_t r = 0; r < m.size(); ++r) {
            if (r != rank && m[r][col])
                for (std::uint32_t c = 0; c < cols; ++c) m[r][c] ^= m[rank][c];
        }
        ++rank;
    }
    return rank;
}

std::vector<int> coeff_bits(const CoefficientVector& v) {
    std::vector<int> out(v.size());
    for (std::uint32_t i = 0; i < v.size(); ++i) out[i] = v.get(i) ? 1 : 0;
    return out;
}

} // namespace

TEST_CASE("page from_image pads and splits") {
    std::vector<std::uint8_t> img(70, 0xAB);
    Page p = Page::from_image(3, 4, 20, img);
    CHECK(p.page_id == 3);
    CHECK(p.packets.size() == 4);
    for (const auto& pk : p.packets) CHECK(pk.size() == 20);
    CHECK(p.packets[3][9] == 0xAB);
    CHECK(p.packets[3][10] == 0x00); // zero padding past byte 70
}

TEST_CASE("coefficient vector bit packing and formatting") {
    CoefficientVector v(FieldSpec::gf2(), 70);
    CHECK(v.is_zero());
    CHECK_FALSE(v.leading().has_value());
    v.set(65, 1);
    v.set(2, 1);
    CHECK(v.get(65) == 1);
    CHECK(v.get(64) == 0);
    CHECK(v.leading() == 2u);
    CHECK(v.to_string().size() == 70);
    CHECK(v.to_string()[2] == '1');
    CHECK(v.to_string()[65] == '1');

    CoefficientVector w(FieldSpec::gf256(), 3);
    w.set(0, 0x0F);
    w.set(2, 0xA0);
    CHECK(w.to_string() == "0f00a0");
}

TEST_CASE("add_scaled matches XOR oracle over GF(2)") {
    Rng rng(9);
    Field f(FieldSpec::gf2());
    for (int t = 0; t < 200; ++t) {
        CoefficientVector a(FieldSpec::gf2(), 130), b(FieldSpec::gf2(), 130);
        std::vector<int> ra(130), rb(130);
        for (std::uint32_t i = 0; i < 130; ++i) {
            ra[i] = static_cast<int>(rng.uniform(2));
            rb[i] = static_cast<int>(rng.uniform(2));
            a.set(i, static_cast<FieldElement>(ra[i]));
            b.set(i, static_cast<FieldElement>(rb[i]));
        }
        a.add_scaled(b, 1, f);
        for (std::uint32_t i = 0; i < 130; ++i) CHECK(a.get(i) == (ra[i] ^ rb[i]));
    }
}

TEST_CASE("payload_add_scaled oracle") {
    Field f(FieldSpec::gf256());
    std::vector<std::uint8_t> dst = {1, 2, 3}, src = {10, 20, 30};
    payload_add_scaled(dst, src, 0x02, f);
    for (int i = 0; i < 3; ++i)
        CHECK(dst[i] == (std::uint8_t)((i + 1) ^ f.mul((std::uint8_t)(10 * (i + 1)), 2)));
}

TEST_CASE("GF(2) encode payload equals XOR of selected packets") {
    Rng prng(5);
    Page page = Page::random(0, 8, 20, prng);
    Field f(FieldSpec::gf2());
    Rng rng(77);
    for (int t = 0; t < 50; ++t) {
        Codeword cw = encode(page, rng, DegreeDistribution::uniform_rlc(), f);
        CHECK_FALSE(cw.coeffs.is_zero());
        std::vector<std::uint8_t> want(20, 0);
        for (std::uint32_t i = 0; i < 8; ++i)
            if (cw.coeffs.get(i))
                for (int b = 0; b < 20; ++b) want[b] ^= page.packets[i][b];
        CHECK(cw.payload == want);
    }
}

TEST_CASE("round trip across k and both fields") {
    for (FieldSpec spec : {FieldSpec::gf2(), FieldSpec::gf256()}) {
        Field f(spec);
        for (std::uint32_t k : {1u, 2u, 7u, 33u, 64u}) {
            Rng prng(1000 + k);
            Page page = Page::random(1, k, 20, prng);
            DecoderState dec(f, 1, k, 20);
            Rng rng(k * 31 + spec.order);
            while (!dec.full_rank())
                dec.absorb(encode(page, rng, DegreeDistribution::uniform_rlc(), f));
            CHECK(dec.decode() == page);
        }
    }
}

TEST_CASE("decoder keeps strict echelon form and monotone rank") {
    Field f(FieldSpec::gf256());
    Rng prng(2);
    Page page = Page::random(0, 12, 20, prng);
    DecoderState dec(f, 0, 12, 20);
    Rng rng(3);
    std::uint32_t prev_rank = 0;
    while (!dec.full_rank()) {
        auto res = dec.absorb(encode(page, rng, DegreeDistribution::uniform_rlc(), f));
        CHECK(dec.rank() >= prev_rank);
        if (res == AbsorbResult::Innovative) CHECK(dec.rank() == prev_rank + 1);
        else CHECK(dec.rank() == prev_rank);
        prev_rank = dec.rank();
        std::uint32_t last_lead = 0;
        bool first = true;
        for (const auto& row : dec.rows()) {
            CHECK(row.coeffs.leading() == row.lead);
            CHECK(row.coeffs.get(row.lead) == 1); // normalized pivot
            if (!first) CHECK(row.lead > last_lead);
            last_lead = row.lead;
            first = false;
        }
    }
    bool saw_all = dec.redundant_count() > 0 || dec.rank() == 12;
    CHECK(saw_all);
}

TEST_CASE("decode below full rank throws with current rank") {
    Field f(FieldSpec::gf2());
    DecoderState dec(f, 0, 4, 20);
    try {
        dec.decode();
        FAIL("expected InsufficientRank");
    } catch (const InsufficientRank& e) {
        CHECK(e.rank == 0);
    }
}

TEST_CASE("recoded codewords stay in the span: GF(2)^4 brute force") {
    Field f(FieldSpec::gf2());
    Rng prng(8);
    Page page = Page::random(0, 4, 20, prng);
    Rng rng(123);
    for (int trial = 0; trial < 100; ++trial) {
        DecoderState dec(f, 0, 4, 20);
        int feeds = 1 + static_cast<int>(rng.uniform(5));
        for (int i = 0; i < feeds; ++i)
            dec.absorb(encode(page, rng, DegreeDistribution::uniform_rlc(), f));
        if (dec.rank() == 0) continue;
        Codeword re = dec.recode(rng);
        // Enumerate every GF(2) combination of the stored rows.
        auto rows = dec.rows();
        bool found = false;
        for (std::uint32_t mask = 1; mask < (1u << rows.size()); ++mask) {
            CoefficientVector acc(FieldSpec::gf2(), 4);
            for (std::uint32_t r = 0; r < rows.size(); ++r)
                if (mask & (1u << r)) acc.add_scaled(rows[r].coeffs, 1, f);
            if (acc == re.coeffs) { found = true; break; }
        }
        CHECK(found);
    }
}

TEST_CASE("decoder rank agrees with reference Gaussian elimination") {
    Field f(FieldSpec::gf2());
    Rng prng(4);
    Page page = Page::random(0, 10, 20, prng);
    Rng rng(55);
    for (int trial = 0; trial < 50; ++trial) {
        DecoderState dec(f, 0, 10, 20);
        std::vector<std::vector<int>> fed;
        int feeds = static_cast<int>(rng.uniform(15));
        for (int i = 0; i < feeds; ++i) {
            Codeword cw = encode(page, rng, DegreeDistribution::uniform_rlc(), f);
            fed.push_back(coeff_bits(cw.coeffs));
            dec.absorb(cw);
        }
        CHECK(dec.rank() == gf2_rank(fed));
    }
}

TEST_CASE("seed_from_page yields identity rows and instant decode") {
    Field f(FieldSpec::gf2());
    Rng prng(6);
    Page page = Page::random(2, 5, 20, prng);
    DecoderState dec(f, 2, 5, 20);
    dec.seed_from_page(page);
    CHECK(dec.full_rank());
    CHECK(dec.decode() == page);
}

TEST_CASE("row op counters grow with work") {
    Field f(FieldSpec::gf2());
    Rng prng(7);
    Page page = Page::random(0, 16, 20, prng);
    DecoderState dec(f, 0, 16, 20);
    Rng rng(70);
    while (!dec.full_rank())
        dec.absorb(encode(page, rng, DegreeDistribution::uniform_rlc(), f));
    auto before = dec.row_ops();
    CHECK(before.coeff_ops > 0);
    CHECK(before.payload_ops > 0);
    dec.decode();
    CHECK(dec.row_ops().total() > before.total()); // back-substitution costs extra
}

TEST_CASE("robust soliton pmf is a distribution with the spike") {
    for (std::uint32_t k : {4u, 16u, 48u}) {
        auto pmf = robust_soliton_pmf(k, 0.1, 0.5);
        REQUIRE(pmf.size() == k);
        double sum = 0;
        for (double p : pmf) {
            CHECK(p >= 0.0);
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(pmf[0] > 0.0); // degree 1 always possible
    }
    auto one = robust_soliton_pmf(1, 0.1, 0.5);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == doctest::Approx(1.0));
}

TEST_CASE("degree sampler tracks the analytic pmf") {
    const std::uint32_t k = 16;
    auto pmf = robust_soliton_pmf(k, 0.1, 0.5);
    Rng rng(99);
    auto dist = DegreeDistribution::sparse_lt();
    const int n = 200000;
    std::vector<int> counts(k + 1, 0);
    for (int i = 0; i < n; ++i) {
        std::uint32_t d = sample_degree(dist, k, rng);
        REQUIRE(d >= 1);
        REQUIRE(d <= k);
        ++counts[d];
    }
    for (std::uint32_t d = 1; d <= k; ++d) {
        double got = static_cast<double>(counts[d]) / n;
        CHECK(std::abs(got - pmf[d - 1]) < 0.01);
    }
    CHECK(sample_degree(DegreeDistribution::uniform_rlc(), 12, rng) == 12);
}

TEST_CASE("sparse LT codewords decode too") {
    Field f(FieldSpec::gf2());
    Rng prng(11);
    Page page = Page::random(0, 24, 20, prng);
    DecoderState dec(f, 0, 24, 20);
    Rng rng(12);
    auto dist = DegreeDistribution::sparse_lt();
    int fed = 0;
    while (!dec.full_rank() && fed < 2000) {
        dec.absorb(encode(page, rng, dist, f));
        ++fed;
    }
    CHECK(dec.full_rank());
    CHECK(dec.decode() == page);
}

TEST_CASE("GF(256) dense overhead is far below the GF(2) overhead") {
    // Analytic mean overhead for uniform nonzero draws over GF(q) is
    // sum_{i>=1} q^-i / (1 - q^-i); for q = 256 that is under 0.004.
    Field f(FieldSpec::gf256());
    Rng rng(21);
    double mean = expected_overhead_trial(f, 16, 2000, rng);
    CHECK(mean < 0.05);
}

TEST_CASE("GF(2) k=1 has zero overhead") {
    Field f(FieldSpec::gf2());
    Rng rng(22);
    CHECK(expected_overhead_trial(f, 1, 500, rng) == 0.0);
}
