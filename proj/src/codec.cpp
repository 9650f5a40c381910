#include "oapsim/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace oapsim {

// ---------------------------------------------------------------- Page

Page Page::from_image(std::uint32_t page_id, std::uint32_t k, std::uint32_t L,
                      const std::vector<std::uint8_t>& image) {
    if (k < 1 || L < 1) throw std::invalid_argument("page needs k >= 1 and L >= 1");
    if (image.size() > static_cast<std::size_t>(k) * L)
        throw std::invalid_argument("image larger than k*L");
    Page p;
    p.page_id = page_id;
    p.k = k;
    p.L = L;
    p.packets.assign(k, std::vector<std::uint8_t>(L, 0));
    for (std::size_t i = 0; i < image.size(); ++i)
        p.packets[i / L][i % L] = image[i];
    return p;
}

Page Page::random(std::uint32_t page_id, std::uint32_t k, std::uint32_t L, Rng& rng) {
    Page p;
    p.page_id = page_id;
    p.k = k;
    p.L = L;
    p.packets.assign(k, std::vector<std::uint8_t>(L, 0));
    for (auto& pkt : p.packets)
        for (auto& b : pkt) b = static_cast<std::uint8_t>(rng.uniform(256));
    return p;
}

// --------------------------------------------------- CoefficientVector

CoefficientVector::CoefficientVector(FieldSpec field, std::uint32_t k)
    : field_(field), k_(k) {
    if (field_.is_gf2())
        bits_.assign((k + 63) / 64, 0);
    else
        bytes_.assign(k, 0);
}

FieldElement CoefficientVector::get(std::uint32_t i) const {
    if (field_.is_gf2())
        return static_cast<FieldElement>((bits_[i / 64] >> (i % 64)) & 1u);
    return bytes_[i];
}

void CoefficientVector::set(std::uint32_t i, FieldElement v) {
    if (field_.is_gf2()) {
        std::uint64_t mask = 1ULL << (i % 64);
        if (v & 1)
            bits_[i / 64] |= mask;
        else
            bits_[i / 64] &= ~mask;
    } else {
        bytes_[i] = v;
    }
}

bool CoefficientVector::is_zero() const {
    if (field_.is_gf2()) {
        for (auto w : bits_)
            if (w) return false;
        return true;
    }
    for (auto b : bytes_)
        if (b) return false;
    return true;
}

std::optional<std::uint32_t> CoefficientVector::leading() const {
    if (field_.is_gf2()) {
        for (std::size_t w = 0; w < bits_.size(); ++w) {
            if (bits_[w]) {
                std::uint32_t idx = static_cast<std::uint32_t>(
                    w * 64 + std::countr_zero(bits_[w]));
                return idx < k_ ? std::optional<std::uint32_t>(idx) : std::nullopt;
            }
        }
        return std::nullopt;
    }
    for (std::uint32_t i = 0; i < k_; ++i)
        if (bytes_[i]) return i;
    return std::nullopt;
}

void CoefficientVector::add_scaled(const CoefficientVector& other,
                                   FieldElement factor, const Field& f) {
    if (field_ != other.field_ || k_ != other.k_)
        throw std::invalid_argument("coefficient vector field/size mismatch");
    if (factor == 0) return;
    if (field_.is_gf2()) {
        for (std::size_t w = 0; w < bits_.size(); ++w)
            bits_[w] ^= other.bits_[w];
    } else {
        for (std::uint32_t i = 0; i < k_; ++i)
            bytes_[i] ^= f.mul(factor, other.bytes_[i]);
    }
}

void CoefficientVector::scale(FieldElement factor, const Field& f) {
    if (field_.is_gf2()) return; // only factor 1 is meaningful
    for (auto& b : bytes_) b = f.mul(factor, b);
}

std::string CoefficientVector::to_string() const {
    std::string out;
    if (field_.is_gf2()) {
        out.reserve(k_);
        for (std::uint32_t i = 0; i < k_; ++i) out.push_back(get(i) ? '1' : '0');
    } else {
        static const char* hex = "0123456789abcdef";
        out.reserve(2 * k_);
        for (std::uint32_t i = 0; i < k_; ++i) {
            out.push_back(hex[bytes_[i] >> 4]);
            out.push_back(hex[bytes_[i] & 0xF]);
        }
    }
    return out;
}

void payload_add_scaled(std::vector<std::uint8_t>& dst,
                        const std::vector<std::uint8_t>& src,
                        FieldElement factor, const Field& f) {
    if (dst.size() != src.size())
        throw std::invalid_argument("payload length mismatch");
    if (factor == 0) return;
    if (f.spec().is_gf2() || factor == 1) {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
    } else {
        for (std::size_t i = 0; i < dst.size(); ++i)
            dst[i] ^= f.mul(factor, src[i]);
    }
}

// --------------------------------------------------------- DecoderState

DecoderState::DecoderState(const Field& field, std::uint32_t page_id,
                           std::uint32_t k, std::uint32_t L)
    : field_(&field), page_id_(page_id), k_(k), L_(L) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
}

void DecoderState::seed_from_page(const Page& page) {
    if (page.k != k_ || page.L != L_ || page.page_id != page_id_)
        throw std::invalid_argument("page does not match decoder dimensions");
    rows_.clear();
    for (std::uint32_t i = 0; i < k_; ++i) {
        Row r;
        r.coeffs = CoefficientVector(field_->spec(), k_);
        r.coeffs.set(i, 1);
        r.payload = page.packets[i];
        r.lead = i;
        rows_.push_back(std::move(r));
    }
}

AbsorbResult DecoderState::absorb(const Codeword& cw) {
    if (cw.page_id != page_id_ || cw.coeffs.size() != k_ ||
        cw.payload.size() != L_ || !(cw.coeffs.field() == field_->spec()))
        throw std::invalid_argument("codeword does not match decoder state");

    CoefficientVector res = cw.coeffs;
    std::vector<std::uint8_t> pay = cw.payload;

    // Forward elimination against existing echelon rows.
    for (const Row& row : rows_) {
        FieldElement c = res.get(row.lead);
        if (c == 0) continue;
        // Rows are normalized to leading coefficient 1, so the factor is c.
        res.add_scaled(row.coeffs, c, *field_);
        payload_add_scaled(pay, row.payload, c, *field_);
        ++ops_.coeff_ops;
        ++ops_.payload_ops;
    }

    auto lead = res.leading();
    if (!lead) {
        ++redundant_;
        return AbsorbResult::Redundant;
    }

    FieldElement lc = res.get(*lead);
    if (lc != 1) {
        FieldElement s = field_->inv(lc);
        res.scale(s, *field_);
        for (auto& b : pay) b = field_->mul(s, b);
        ++ops_.coeff_ops;
        ++ops_.payload_ops;
    }

    Row nr{std::move(res), std::move(pay), *lead};
    auto pos = std::lower_bound(rows_.begin(), rows_.end(), nr.lead,
                                [](const Row& r, std::uint32_t l) { return r.lead < l; });
    rows_.insert(pos, std::move(nr));
    return AbsorbResult::Innovative;
}

Page DecoderState::decode() {
    if (!full_rank()) throw InsufficientRank(rank());

    // Full rank in echelon form means leads are exactly 0..k-1.
    std::vector<Row> work = rows_;
    for (std::uint32_t col = k_; col-- > 0;) {
        const Row& pivot = work[col];
        for (std::uint32_t r = 0; r < col; ++r) {
            FieldElement c = work[r].coeffs.get(col);
            if (c == 0) continue;
            work[r].coeffs.add_scaled(pivot.coeffs, c, *field_);
            payload_add_scaled(work[r].payload, pivot.payload, c, *field_);
            ++ops_.coeff_ops;
            ++ops_.payload_ops;
        }
    }

    Page out;
    out.page_id = page_id_;
    out.k = k_;
    out.L = L_;
    out.packets.reserve(k_);
    for (auto& row : work) out.packets.push_back(std::move(row.payload));
    return out;
}

Codeword DecoderState::recode(Rng& rng) const {
    if (rows_.empty()) throw std::logic_error("nothing to recode: rank is 0");

    const std::uint32_t r = rank();
    std::vector<FieldElement> mix(r, 0);
    bool all_zero = true;
    do {
        all_zero = true;
        for (std::uint32_t i = 0; i < r; ++i) {
            mix[i] = field_->spec().is_gf2()
                         ? static_cast<FieldElement>(rng.uniform(2))
                         : static_cast<FieldElement>(rng.uniform(256));
            if (mix[i]) all_zero = false;
        }
    } while (all_zero);

    Codeword cw;
    cw.page_id = page_id_;
    cw.coeffs = CoefficientVector(field_->spec(), k_);
    cw.payload.assign(L_, 0);
    for (std::uint32_t i = 0; i < r; ++i) {
        if (mix[i] == 0) continue;
        cw.coeffs.add_scaled(rows_[i].coeffs, mix[i], *field_);
        payload_add_scaled(cw.payload, rows_[i].payload, mix[i], *field_);
    }
    return cw;
}

// ------------------------------------------------- degree distributions

std::vector<double> robust_soliton_pmf(std::uint32_t k, double c, double delta) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (c <= 0.0 || delta <= 0.0 || delta >= 1.0)
        throw std::invalid_argument("robust soliton needs c > 0 and delta in (0,1)");
    if (k == 1) return {1.0};

    std::vector<double> rho(k + 1, 0.0), tau(k + 1, 0.0);
    rho[1] = 1.0 / k;
    for (std::uint32_t d = 2; d <= k; ++d)
        rho[d] = 1.0 / (static_cast<double>(d) * (d - 1));

    double R = c * std::log(static_cast<double>(k) / delta) * std::sqrt(static_cast<double>(k));
    if (R > 0) {
        std::uint32_t spike = static_cast<std::uint32_t>(
            std::clamp(std::floor(static_cast<double>(k) / R), 1.0, static_cast<double>(k)));
        for (std::uint32_t d = 1; d < spike; ++d)
            tau[d] = R / (static_cast<double>(d) * k);
        tau[spike] = R * std::log(R / delta) / k;
        if (tau[spike] < 0) tau[spike] = 0;
    }

    double beta = 0.0;
    for (std::uint32_t d = 1; d <= k; ++d) beta += rho[d] + tau[d];
    std::vector<double> mu(k);
    for (std::uint32_t d = 1; d <= k; ++d) mu[d - 1] = (rho[d] + tau[d]) / beta;
    return mu;
}

std::uint32_t sample_degree(const DegreeDistribution& dist, std::uint32_t k, Rng& rng) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (dist.kind == DegreeDistribution::Kind::UniformRlc) return k;
    auto pmf = robust_soliton_pmf(k, dist.c, dist.delta);
    double u = rng.uniform01();
    double acc = 0.0;
    for (std::uint32_t d = 0; d < k; ++d) {
        acc += pmf[d];
        if (u < acc) return d + 1;
    }
    return k;
}

// --------------------------------------------------------------- encode

Codeword encode(const Page& page, Rng& rng, const DegreeDistribution& dist,
                const Field& field) {
    Codeword cw;
    cw.page_id = page.page_id;
    cw.coeffs = CoefficientVector(field.spec(), page.k);

    if (dist.kind == DegreeDistribution::Kind::UniformRlc) {
        do {
            for (std::uint32_t i = 0; i < page.k; ++i)
                cw.coeffs.set(i, field.spec().is_gf2()
                                     ? static_cast<FieldElement>(rng.uniform(2))
                                     : static_cast<FieldElement>(rng.uniform(256)));
        } while (cw.coeffs.is_zero());
    } else {
        if (!field.spec().is_gf2())
            throw std::invalid_argument("sparse LT coding is defined over GF(2)");
        std::uint32_t d = sample_degree(dist, page.k, rng);
        // Partial Fisher-Yates for d distinct indices.
        std::vector<std::uint32_t> idx(page.k);
        for (std::uint32_t i = 0; i < page.k; ++i) idx[i] = i;
        for (std::uint32_t i = 0; i < d; ++i) {
            std::uint32_t j = i + static_cast<std::uint32_t>(rng.uniform(page.k - i));
            std::swap(idx[i], idx[j]);
            cw.coeffs.set(idx[i], 1);
        }
    }

    cw.payload.assign(page.L, 0);
    for (std::uint32_t i = 0; i < page.k; ++i) {
        FieldElement g = cw.coeffs.get(i);
        if (g) payload_add_scaled(cw.payload, page.packets[i], g, field);
    }
    return cw;
}

double expected_overhead_trial(const Field& field, std::uint32_t k,
                               std::uint32_t trials, Rng& rng) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    Page dummy;
    dummy.page_id = 0;
    dummy.k = k;
    dummy.L = 1;
    dummy.packets.assign(k, std::vector<std::uint8_t>(1, 0));
    auto dist = DegreeDistribution::uniform_rlc();

    std::uint64_t extra = 0;
    for (std::uint32_t t = 0; t < trials; ++t) {
        DecoderState st(field, 0, k, 1);
        while (!st.full_rank())
            st.absorb(encode(dummy, rng, dist, field));
        extra += st.redundant_count();
    }
    return static_cast<double>(extra) / trials;
}

} // namespace oapsim
