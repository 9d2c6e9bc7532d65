#include "coalnet/report.hpp"
#include "coalnet/errors.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

using namespace coalnet;

namespace {

struct GlobalOpts {
    bool exact = false;
    double tol = 1e-9;
    std::string format = "text";
    double lambda_max = 1e-2;
    double seed_delta = 1e-3;
};

bool looks_like_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return j.contains("first") && j.contains("second");
}

OracleConfig oracle_config(const GlobalOpts& g) {
    OracleConfig cfg;
    cfg.lambda_max = g.lambda_max;
    cfg.seed_delta = g.seed_delta;
    return cfg;
}

int run_net_show(const std::string& path, const GlobalOpts& g) {
    Network net = load_network(path);
    if (g.format == "json") {
        nlohmann::json j;
        j["network"] = nlohmann::json::parse(network_to_json(net));
        j["adjacency"] = nlohmann::json::parse("[]");
        auto dump_mat = [](const RatMat& m) {
            nlohmann::json rows = nlohmann::json::array();
            for (int i = 0; i < m.rows(); ++i) {
                nlohmann::json r = nlohmann::json::array();
                for (int c = 0; c < m.cols(); ++c) r.push_back(rat_to_string(m(i, c)));
                rows.push_back(r);
            }
            return rows;
        };
        j["adjacency"] = dump_mat(net.adjacency());
        j["valency"] = dump_mat(net.valency_matrix());
        j["laplacian"] = dump_mat(net.laplacian());
        j["regular"] = net.is_regular();
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "cells: " << net.n_cells() << (net.is_regular() ? " (regular)" : "") << "\n";
        std::cout << "W =\n" << net.adjacency().to_string() << "\n";
        std::cout << "D =\n" << net.valency_matrix().to_string() << "\n";
        std::cout << "L =\n" << net.laplacian().to_string() << "\n";
    }
    return 0;
}

int run_net_coalesce(const std::string& a, int m1, const std::string& b, int m2, const std::string& out,
                     const GlobalOpts& g) {
    CoalescenceSpec spec{load_network(a), m1, load_network(b), m2};
    Network net = coalesce(spec);
    if (!out.empty()) save_network(net, out);
    if (g.format == "json")
        std::cout << network_to_json(net) << "\n";
    else
        std::cout << "coalescence (" << net.n_cells() << " cells, "
                  << (is_ffcn(spec) ? "feedforward" : "not feedforward") << ")\nL =\n"
                  << net.laplacian().to_string() << "\n";
    return 0;
}

int run_spectrum(const std::string& path, bool check_union, const GlobalOpts& g) {
    SpectralOptions sopt{g.exact, g.tol};
    if (looks_like_spec(path)) {
        CoalescenceSpec spec = load_coalescence_spec(path);
        Network net = coalesce(spec);
        SpectralStructure s = eigen_structure(net.laplacian(), sopt);
        if (check_union) {
            if (!is_ffcn(spec)) throw PreconditionError("--check-union needs a feedforward coalescence");
            UnionCheckReport u = spectrum_union_check(spec, sopt);
            if (g.format == "json") {
                nlohmann::json j = nlohmann::json::parse(spectral_json(s));
                nlohmann::json rows = nlohmann::json::array();
                for (const auto& r : u.rows) {
                    nlohmann::json row;
                    row["value"] = r.value.real();
                    row["m1"] = r.mult_first;
                    row["m2"] = r.mult_second;
                    row["mN"] = r.mult_coalescence;
                    row["expected"] = r.expected;
                    row["ok"] = r.ok;
                    rows.push_back(row);
                }
                j["union_check_ok"] = u.ok;
                j["union_check"] = rows;
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << spectral_text(s);
                std::cout << "union check: " << (u.ok ? "ok" : "FAILED") << "\n";
            }
            return u.ok ? 0 : 4;
        }
        std::cout << (g.format == "json" ? spectral_json(s) + "\n" : spectral_text(s));
        return 0;
    }
    Network net = load_network(path);
    SpectralStructure s = eigen_structure(net.laplacian(), sopt);
    std::cout << (g.format == "json" ? spectral_json(s) + "\n" : spectral_text(s));
    return 0;
}

int run_classify(const std::string& spec_path, const std::string& jet_path, bool seed_oracle,
                 const GlobalOpts& g) {
    CoalescenceSpec spec = load_coalescence_spec(spec_path);
    DiffusiveJet jet = load_jet(jet_path);
    AnalysisReport rep = classify_report(spec, jet, seed_oracle, oracle_config(g));
    std::cout << (g.format == "json" ? render_json(rep) + "\n" : render_text(rep));
    return 0;
}

int run_verify(const std::string& spec_path, const std::string& jet_path, const GlobalOpts& g) {
    CoalescenceSpec spec = load_coalescence_spec(spec_path);
    DiffusiveJet jet = load_jet(jet_path);
    AnalysisReport rep = verify_report(spec, jet, oracle_config(g));
    std::cout << (g.format == "json" ? render_json(rep) + "\n" : render_text(rep));
    return rep.all_agree ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted coupled-cell coalescence networks: spectra, bifurcation-branch "
                 "classification and numerical verification"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_flag("--exact", g.exact, "force the exact rational path (fails on irrational spectra)")
        ->envname("COALNET_EXACT");
    app.add_option("--tol", g.tol, "relative clustering/rank tolerance")->envname("COALNET_TOL");
    app.add_option("--format", g.format, "output format: text or json")
        ->check(CLI::IsMember({"text", "json"}))
        ->envname("COALNET_FORMAT");
    app.add_option("--lambda-max", g.lambda_max, "upper end of the oracle lambda window")
        ->envname("COALNET_LAMBDA_MAX");
    app.add_option("--seed-delta", g.seed_delta, "fixed seed amplitude of the oracle grid")
        ->envname("COALNET_SEED_DELTA");

    auto* net = app.add_subcommand("net", "network inspection and coalescence");
    net->require_subcommand(1);
    net->fallthrough();
    std::string show_path;
    auto* show = net->add_subcommand("show", "print W, D and L of a network file");
    show->fallthrough();
    show->add_option("file", show_path)->required();
    std::string ca, cb, cout_path;
    int cm1 = 0, cm2 = 0;
    auto* coal = net->add_subcommand("coalesce", "coalesce two network files");
    coal->fallthrough();
    coal->add_option("first", ca)->required();
    coal->add_option("merge_1", cm1)->required();
    coal->add_option("second", cb)->required();
    coal->add_option("merge_2", cm2)->required();
    coal->add_option("-o,--output", cout_path, "write the coalescence to this file");

    std::string spectrum_path;
    bool check_union = false;
    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues, multiplicities and chains");
    spectrum->fallthrough();
    spectrum->add_option("file", spectrum_path)->required();
    spectrum->add_flag("--check-union", check_union, "verify the multiplicity identities (FFCN input)");

    std::string cl_spec, cl_jet;
    bool no_seed_oracle = false;
    auto* classify = app.add_subcommand("classify", "per-seed case classification and predictions");
    classify->fallthrough();
    classify->add_option("spec", cl_spec)->required();
    classify->add_option("jet", cl_jet)->required();
    classify->add_flag("--no-seed-oracle", no_seed_oracle, "closed-form seeds only");

    std::string vf_spec, vf_jet;
    auto* verify = app.add_subcommand("verify", "predictions against the continuation oracle");
    verify->fallthrough();
    verify->add_option("spec", vf_spec)->required();
    verify->add_option("jet", vf_jet)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (show->parsed()) return run_net_show(show_path, g);
        if (coal->parsed()) return run_net_coalesce(ca, cm1, cb, cm2, cout_path, g);
        if (spectrum->parsed()) return run_spectrum(spectrum_path, check_union, g);
        if (classify->parsed()) return run_classify(cl_spec, cl_jet, !no_seed_oracle, g);
        if (verify->parsed()) return run_verify(vf_spec, vf_jet, g);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const IndexError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const ConnectivityError& e) {
        std::cerr << "invalid network: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition: " << e.what() << "\n";
        return 3;
    } catch (const GenericityError& e) {
        std::cerr << "precondition: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
