#include "adpo/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace adpo {

static const char* kMagic = "adpo-params-v1";

void save_params(const PolicyParams& params, std::ostream& out) {
    out << kMagic << "\n";
    out << "kind " << to_string(params.kind) << "\n";
    out << "num_queries " << params.num_queries << "\n";
    out << "score_bins " << params.score_bins << "\n";
    out << "answer_indices " << params.answer_indices << "\n";
    out << "positions " << params.position_vocab.size();
    for (int v : params.position_vocab) out << " " << v;
    out << "\n";
    char buf[64];
    for (size_t pos = 0; pos < params.answer_logits.size(); ++pos) {
        out << "answer_table " << pos << "\n";
        for (size_t i = 0; i < params.answer_logits[pos].size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", params.answer_logits[pos][i]);
            out << buf << (i + 1 == params.answer_logits[pos].size() ? "\n" : " ");
        }
    }
    out << "score_table\n";
    for (size_t i = 0; i < params.score_logits.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", params.score_logits[i]);
        out << buf << (i + 1 == params.score_logits.size() ? "\n" : " ");
    }
}

void save_params_file(const PolicyParams& params, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    save_params(params, out);
}

static void expect(std::istream& in, const std::string& token) {
    std::string got;
    in >> got;
    if (got != token) {
        throw std::runtime_error("params parse error: expected '" + token + "', got '" +
                                 got + "'");
    }
}

PolicyParams load_params(std::istream& in) {
    std::string magic;
    in >> magic;
    if (magic != kMagic) throw std::runtime_error("not a params file");
    PolicyParams p;
    std::string kind_str;
    expect(in, "kind");
    in >> kind_str;
    p.kind = task_kind_from_string(kind_str);
    expect(in, "num_queries");
    in >> p.num_queries;
    expect(in, "score_bins");
    in >> p.score_bins;
    expect(in, "answer_indices");
    in >> p.answer_indices;
    expect(in, "positions");
    size_t positions;
    in >> positions;
    p.position_vocab.resize(positions);
    for (size_t i = 0; i < positions; ++i) in >> p.position_vocab[i];
    p.answer_logits.resize(positions);
    for (size_t pos = 0; pos < positions; ++pos) {
        expect(in, "answer_table");
        size_t idx;
        in >> idx;
        if (idx != pos) throw std::runtime_error("params parse error: table order");
        p.answer_logits[pos].resize(static_cast<size_t>(p.num_queries) *
                                    p.position_vocab[pos]);
        for (double& v : p.answer_logits[pos]) in >> v;
    }
    expect(in, "score_table");
    p.score_logits.resize(static_cast<size_t>(p.num_queries) * p.answer_indices *
                          p.score_bins);
    for (double& v : p.score_logits) in >> v;
    if (!in) throw std::runtime_error("params parse error: truncated file");
    return p;
}

PolicyParams load_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open params file: " + path);
    return load_params(in);
}

}  // namespace adpo
