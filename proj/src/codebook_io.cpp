#include "keyagree/codebook_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace keyagree {
namespace {

std::string expect_line(std::istream& in, const char* what) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line.front() == '#') continue;  // comment / header record
        return line;
    }
    throw ParameterError(std::string("codebook file truncated before ") + what);
}

long parse_field(const std::string& line, const std::string& key) {
    if (line.rfind(key + " ", 0) != 0) throw ParameterError("expected '" + key + "' line in codebook file");
    return std::stol(line.substr(key.size() + 1));
}

}  // namespace

void write_codebook(std::ostream& out, const Codebook& cb) {
    out << "keyagree-codebook v1\n";
    out << "n " << cb.n() << "\n";
    out << "m " << cb.m() << "\n";
    out << "d " << cb.declared_min_distance() << "\n";
    out << "construction " << construction_name(cb.construction()) << "\n";
    if (cb.field()) {
        out << "poly 0x" << std::hex << cb.field()->poly() << std::dec << "\n";
    } else {
        out << "poly -\n";
    }
    const auto& words = cb.codewords();
    out << "count " << words.size() << "\n";
    for (const auto& w : words) out << w.to_hex() << "\n";
}

std::string codebook_to_string(const Codebook& cb) {
    std::ostringstream out;
    write_codebook(out, cb);
    return out.str();
}

LoadedCodebook read_codebook(std::istream& in) {
    if (expect_line(in, "header") != "keyagree-codebook v1") {
        throw ParameterError("not a keyagree codebook file");
    }
    const int n = static_cast<int>(parse_field(expect_line(in, "n"), "n"));
    const int m = static_cast<int>(parse_field(expect_line(in, "m"), "m"));
    const int d = static_cast<int>(parse_field(expect_line(in, "d"), "d"));
    const std::string cons_line = expect_line(in, "construction");
    if (cons_line.rfind("construction ", 0) != 0) throw ParameterError("expected 'construction' line");
    const auto tag = construction_from_name(cons_line.substr(13));
    if (!tag) throw ParameterError("unknown construction '" + cons_line.substr(13) + "'");
    const std::string poly_line = expect_line(in, "poly");
    if (poly_line.rfind("poly ", 0) != 0) throw ParameterError("expected 'poly' line");
    std::uint32_t poly = 0;
    if (const std::string body = poly_line.substr(5); body != "-") {
        if (body.rfind("0x", 0) != 0) throw ParameterError("field modulus must be hex or '-'");
        poly = static_cast<std::uint32_t>(std::stoul(body.substr(2), nullptr, 16));
    }
    const auto count = static_cast<std::uint64_t>(parse_field(expect_line(in, "count"), "count"));
    std::vector<LinkTuple> words;
    words.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        words.push_back(LinkTuple::from_hex(n, m, expect_line(in, "codeword")));
    }
    LoadedCodebook loaded{make_explicit(n, m, d, std::move(words)), *tag, poly};
    return loaded;
}

}  // namespace keyagree
