#include "coalnet/report.hpp"
#include "coalnet/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace coalnet {

using nlohmann::json;

namespace {

int expected_nontrivial(const BranchPrediction& pred, const BranchSeed& seed, int side) {
    switch (pred.tag) {
        case CaseTag::OnlyInFirst:
            return seed.exists_on(side) ? (seed.trivial ? 0 : 1) : 0;
        case CaseTag::SqrtCase:
        case CaseTag::QuarterRootCase:
            return side == pred.lambda_domain ? 2 : 0;
        case CaseTag::LinearCase:
            return seed.trivial ? 1 : 2;
        case CaseTag::PitchforkLSCase: {
            int base = seed.trivial ? 0 : 1; // the y = 0 extension, both sides
            return base + (side == pred.lambda_domain ? 2 : 0);
        }
        default:
            return -1;
    }
}

bool head_is_zero(const NumericalBranch& br, int n1) {
    for (int c = 0; c < n1; ++c)
        if (!br.zero_cell[c]) return false;
    return true;
}

int match_seed(const NumericalBranch& br, const std::vector<SeedReport>& seeds, int n1) {
    if (head_is_zero(br, n1)) {
        for (size_t i = 0; i < seeds.size(); ++i)
            if (seeds[i].seed.trivial) return static_cast<int>(i);
        return -1;
    }
    // compare the head restriction at the largest sampled lambda
    double lambda = br.lambdas.back();
    const auto& state = br.states.back();
    int best = -1;
    double best_d = 0;
    for (size_t i = 0; i < seeds.size(); ++i) {
        const BranchSeed& s = seeds[i].seed;
        if (s.trivial || !s.exists_on(br.side)) continue;
        auto ref = s.eval(lambda);
        double d = 0, scale = 0;
        for (int c = 0; c < n1; ++c) {
            d = std::max(d, std::abs(state[c] - ref[c]));
            scale = std::max({scale, std::abs(ref[c]), std::abs(state[c])});
        }
        if (scale == 0) continue;
        d /= scale;
        if (best < 0 || d < best_d) {
            best = static_cast<int>(i);
            best_d = d;
        }
    }
    return (best >= 0 && best_d < 0.35) ? best : -1;
}

} // namespace

AnalysisReport classify_report(const CoalescenceSpec& raw, const DiffusiveJet& jet, bool seed_oracle,
                               const OracleConfig& cfg) {
    CoalescenceSpec spec = raw.canonical();
    if (!is_ffcn(spec)) throw PreconditionError("the coalescence is not feedforward");
    AnalysisReport rep;
    rep.coalesced = coalesce(spec);
    auto mu = bifurcation_eigenvalue(rep.coalesced, jet);
    if (!mu) throw PreconditionError("the jet satisfies no bifurcation condition on this network");
    rep.has_mu = true;
    rep.mu_star = *mu;
    rep.union_checked = true;
    rep.union_check = spectrum_union_check(spec);

    SpectralStructure s1 = eigen_structure(spec.first.laplacian());
    bool in_first = s1.has_eigenvalue(*mu, 1e-9);

    std::vector<BranchSeed> seeds;
    if (in_first) {
        seeds = n1_branch_seeds(spec.first, jet, *mu, seed_oracle, cfg);
    } else {
        BranchSeed trivial;
        trivial.origin = "trivial";
        trivial.trivial = true;
        trivial.exact = true;
        trivial.slope_exact.assign(spec.first.n_cells(), Rational(0));
        trivial.slope.assign(spec.first.n_cells(), 0.0);
        seeds.push_back(trivial);
        rep.note = "bifurcation lives in the second component only";
    }
    for (auto& s : seeds) {
        SeedReport sr;
        sr.seed = std::move(s);
        sr.prediction = predict_branch(spec, jet, sr.seed);
        rep.seeds.push_back(std::move(sr));
    }
    return rep;
}

AnalysisReport verify_report(const CoalescenceSpec& raw, const DiffusiveJet& jet, const OracleConfig& cfg,
                             const AgreementTolerances& tol) {
    CoalescenceSpec spec = raw.canonical();
    AnalysisReport rep = classify_report(spec, jet, true, cfg);
    AdmissibleSystem sys(rep.coalesced, jet);
    rep.oracle = trace_branches(sys, cfg);
    rep.oracle_ran = true;
    const int n1 = spec.first.n_cells();
    const int n = rep.coalesced.n_cells();

    rep.branch_seed.assign(rep.oracle.size(), -1);
    for (size_t b = 0; b < rep.oracle.size(); ++b) {
        if (rep.oracle[b].is_trivial) continue;
        rep.branch_seed[b] = match_seed(rep.oracle[b], rep.seeds, n1);
    }

    for (size_t si = 0; si < rep.seeds.size(); ++si) {
        SeedReport& sr = rep.seeds[si];
        sr.expected_pos = expected_nontrivial(sr.prediction, sr.seed, +1);
        sr.expected_neg = expected_nontrivial(sr.prediction, sr.seed, -1);
        std::ostringstream detail;
        for (size_t b = 0; b < rep.oracle.size(); ++b) {
            if (rep.branch_seed[b] != static_cast<int>(si)) continue;
            const NumericalBranch& br = rep.oracle[b];
            (br.side > 0 ? sr.observed_pos : sr.observed_neg) += 1;
            // exponent agreement per cell
            for (int c = 0; c < n; ++c) {
                const Rational& pe = sr.prediction.growth_exponent[c];
                if (pe == 0) continue;
                double target = to_double(pe);
                double tolerance = target < 0.75 ? tol.exp_half : tol.exp_linear;
                if (br.zero_cell[c]) {
                    // an extension may vanish at cells a sibling branch uses;
                    // only the head cells of a nontrivial seed are mandatory
                    if (c < n1 && !sr.seed.trivial) {
                        sr.agree_exponents = false;
                        detail << "cell " << c + 1 << " unexpectedly zero; ";
                    }
                    continue;
                }
                if (std::abs(br.exponent[c] - target) > tolerance) {
                    sr.agree_exponents = false;
                    detail << "cell " << c + 1 << " exponent " << br.exponent[c] << " vs " << target << "; ";
                }
            }
        }
        if (sr.expected_pos >= 0 && sr.observed_pos != sr.expected_pos) sr.agree_count = false;
        if (sr.expected_neg >= 0 && sr.observed_neg != sr.expected_neg) sr.agree_count = false;
        sr.detail = detail.str();
        if (sr.expected_pos >= 0) rep.all_agree = rep.all_agree && sr.agree_count && sr.agree_exponents;
    }
    return rep;
}

namespace {

std::string eigen_line(const EigenvalueData& e) {
    std::ostringstream os;
    if (e.exact)
        os << rat_to_string(e.exact_value);
    else if (std::abs(e.value.imag()) > 1e-12)
        os << e.value.real() << (e.value.imag() >= 0 ? "+" : "") << e.value.imag() << "i";
    else
        os << e.value.real();
    os << "  m_a=" << e.alg_mult << " m_g=" << e.geo_mult
       << (e.is_semisimple() ? "  semisimple" : "  NOT semisimple");
    return os.str();
}

} // namespace

std::string spectral_text(const SpectralStructure& s) {
    std::ostringstream os;
    os << "eigenvalues (" << (s.all_exact ? "exact" : "mixed/float") << "):\n";
    for (const auto& e : s.eigenvalues) {
        os << "  " << eigen_line(e) << "\n";
        for (const auto& chain : e.chains) {
            os << "    chain:";
            for (const auto& v : chain) os << " " << ratvec_to_string(v);
            os << "\n";
        }
    }
    if (s.clustering_warning) os << "  warning: eigenvalue clusters closer than 10x tolerance\n";
    return os.str();
}

std::string spectral_json(const SpectralStructure& s) {
    json j;
    j["dimension"] = s.dimension;
    j["all_exact"] = s.all_exact;
    j["clustering_warning"] = s.clustering_warning;
    json eigs = json::array();
    for (const auto& e : s.eigenvalues) {
        json je;
        je["value_re"] = e.value.real();
        je["value_im"] = e.value.imag();
        if (e.exact) je["value_exact"] = rat_to_string(e.exact_value);
        je["alg_mult"] = e.alg_mult;
        je["geo_mult"] = e.geo_mult;
        je["semisimple"] = e.is_semisimple();
        json chains = json::array();
        for (const auto& chain : e.chains) {
            json jc = json::array();
            for (const auto& v : chain) {
                json jv = json::array();
                for (const auto& q : v) jv.push_back(rat_to_string(q));
                jc.push_back(jv);
            }
            chains.push_back(jc);
        }
        je["chains"] = chains;
        eigs.push_back(je);
    }
    j["eigenvalues"] = eigs;
    return j.dump(2);
}

std::string render_text(const AnalysisReport& rep) {
    std::ostringstream os;
    os << "coalescence network: " << rep.coalesced.n_cells() << " cells\n";
    if (rep.has_mu) os << "bifurcation eigenvalue mu* = " << rat_to_string(rep.mu_star) << "\n";
    if (rep.union_checked) {
        os << "spectrum union check: " << (rep.union_check.ok ? "ok" : "FAILED") << "\n";
        for (const auto& row : rep.union_check.rows)
            os << "  mu=" << row.value.real() << "  m1=" << row.mult_first << " m2=" << row.mult_second
               << " mN=" << row.mult_coalescence << " expected=" << row.expected
               << (row.ok ? "" : "  MISMATCH") << "\n";
    }
    if (!rep.note.empty()) os << rep.note << "\n";
    for (size_t i = 0; i < rep.seeds.size(); ++i) {
        const auto& sr = rep.seeds[i];
        os << "seed " << i << " [" << sr.seed.origin << "]";
        if (!sr.seed.trivial) {
            os << " slope=(";
            for (size_t c = 0; c < sr.seed.slope.size(); ++c) os << (c ? "," : "") << sr.seed.slope[c];
            os << ")";
        }
        os << "\n  case: " << to_string(sr.prediction.tag) << ", branches per seed: " << sr.prediction.branch_count
           << ", lambda side: "
           << (sr.prediction.lambda_domain == 0 ? "both" : sr.prediction.lambda_domain > 0 ? "positive" : "negative")
           << "\n  exponents: (";
        for (size_t c = 0; c < sr.prediction.growth_exponent.size(); ++c)
            os << (c ? "," : "") << rat_to_string(sr.prediction.growth_exponent[c]);
        os << ")\n";
        if (sr.prediction.z2_lambda) os << "  z''_lambda = " << rat_to_string(*sr.prediction.z2_lambda) << "\n";
        if (sr.prediction.z4_lambda) os << "  z4_lambda = " << rat_to_string(*sr.prediction.z4_lambda) << "\n";
        if (sr.prediction.psi_yy) os << "  psi_yy = " << rat_to_string(*sr.prediction.psi_yy) << "\n";
        if (sr.prediction.psi_yyy) os << "  psi_yyy = " << rat_to_string(*sr.prediction.psi_yyy) << "\n";
        if (!sr.prediction.note.empty()) os << "  note: " << sr.prediction.note << "\n";
        if (rep.oracle_ran && sr.expected_pos >= 0)
            os << "  oracle: +side " << sr.observed_pos << "/" << sr.expected_pos << ", -side " << sr.observed_neg
               << "/" << sr.expected_neg << (sr.agree_count ? "" : "  COUNT MISMATCH")
               << (sr.agree_exponents ? "" : "  EXPONENT MISMATCH") << "\n";
        else if (rep.oracle_ran)
            os << "  oracle (no prediction): +side " << sr.observed_pos << ", -side " << sr.observed_neg << "\n";
        if (!sr.detail.empty()) os << "  detail: " << sr.detail << "\n";
    }
    if (rep.oracle_ran) {
        int nontrivial_pos = 0, nontrivial_neg = 0;
        for (const auto& b : rep.oracle)
            if (!b.is_trivial) (b.side > 0 ? nontrivial_pos : nontrivial_neg) += 1;
        os << "oracle branches: " << rep.oracle.size() << " (nontrivial: +" << nontrivial_pos << " / -"
           << nontrivial_neg << ")\n";
        os << "verdict: " << (rep.all_agree ? "all predictions agree with the oracle" : "DISAGREEMENT") << "\n";
    }
    return os.str();
}

std::string render_json(const AnalysisReport& rep) {
    json j;
    j["n_cells"] = rep.coalesced.n_cells();
    if (rep.has_mu) j["mu_star"] = rat_to_string(rep.mu_star);
    if (rep.union_checked) {
        json u;
        u["ok"] = rep.union_check.ok;
        json rows = json::array();
        for (const auto& row : rep.union_check.rows) {
            json r;
            r["value"] = row.value.real();
            r["m1"] = row.mult_first;
            r["m2"] = row.mult_second;
            r["mN"] = row.mult_coalescence;
            r["expected"] = row.expected;
            r["ok"] = row.ok;
            rows.push_back(r);
        }
        u["rows"] = rows;
        j["union_check"] = u;
    }
    json seeds = json::array();
    for (const auto& sr : rep.seeds) {
        json s;
        s["origin"] = sr.seed.origin;
        s["trivial"] = sr.seed.trivial;
        s["slope"] = sr.seed.slope;
        s["case"] = to_string(sr.prediction.tag);
        s["branch_count"] = sr.prediction.branch_count;
        s["lambda_domain"] = sr.prediction.lambda_domain;
        json exps = json::array();
        for (const auto& e : sr.prediction.growth_exponent) exps.push_back(rat_to_string(e));
        s["growth_exponents"] = exps;
        if (sr.prediction.z2_lambda) s["z2_lambda"] = rat_to_string(*sr.prediction.z2_lambda);
        if (sr.prediction.z4_lambda) s["z4_lambda"] = rat_to_string(*sr.prediction.z4_lambda);
        if (sr.prediction.psi_yy) s["psi_yy"] = rat_to_string(*sr.prediction.psi_yy);
        if (sr.prediction.psi_yyy) s["psi_yyy"] = rat_to_string(*sr.prediction.psi_yyy);
        if (sr.prediction.psi_yl_exact) s["psi_ylambda"] = rat_to_string(*sr.prediction.psi_yl_exact);
        if (rep.oracle_ran) {
            s["observed_pos"] = sr.observed_pos;
            s["observed_neg"] = sr.observed_neg;
            s["expected_pos"] = sr.expected_pos;
            s["expected_neg"] = sr.expected_neg;
            s["agree"] = sr.agree_count && sr.agree_exponents;
        }
        if (!sr.detail.empty()) s["detail"] = sr.detail;
        seeds.push_back(s);
    }
    j["seeds"] = seeds;
    if (rep.oracle_ran) {
        j["all_agree"] = rep.all_agree;
        json branches = json::array();
        for (size_t b = 0; b < rep.oracle.size(); ++b) {
            const auto& br = rep.oracle[b];
            json jb;
            jb["side"] = br.side;
            jb["trivial"] = br.is_trivial;
            jb["samples"] = br.lambdas.size();
            jb["exponent"] = br.exponent;
            jb["exponent_halfwidth"] = br.exponent_halfwidth;
            jb["seed"] = rep.branch_seed[b];
            branches.push_back(jb);
        }
        j["oracle_branches"] = branches;
    }
    if (!rep.note.empty()) j["note"] = rep.note;
    return j.dump(2);
}

} // namespace coalnet
